#pragma once

#include <cstdint>
#include <vector>

namespace zext {

// Dense matrix over GF(p) for a 31-bit prime p: products of two reduced
// entries fit in 64 bits.
struct PrimeFieldMatrix {
    uint64_t p = (1ULL << 31) - 1;  // Mersenne prime 2^31-1, configurable
    int rows = 0, cols = 0;
    std::vector<std::vector<uint64_t>> a;
    std::vector<int> col_labels;  // ground element per column (optional)

    static PrimeFieldMatrix zero(int rows, int cols, uint64_t p);
};

uint64_t f_add(uint64_t x, uint64_t y, uint64_t p);
uint64_t f_sub(uint64_t x, uint64_t y, uint64_t p);
uint64_t f_mul(uint64_t x, uint64_t y, uint64_t p);
uint64_t f_pow(uint64_t x, uint64_t e, uint64_t p);
uint64_t f_inv(uint64_t x, uint64_t p);

// Exact rank of the selected columns.
int field_rank(const PrimeFieldMatrix& m, const std::vector<int>& cols);
int field_rank(const PrimeFieldMatrix& m);

// Row basis of the same row space (preserves all column dependencies).
PrimeFieldMatrix row_reduce(const PrimeFieldMatrix& m);

// Representation of the dual matroid: for a full-row-rank r x n matrix,
// returns an (n-r) x n matrix whose independent column sets are exactly the
// complements of spanning sets.
PrimeFieldMatrix dual_representation(const PrimeFieldMatrix& m);

// Determinant of the square submatrix given by row and column selections.
uint64_t minor_det(const PrimeFieldMatrix& m, const std::vector<int>& rows,
                   const std::vector<int>& cols);

}  // namespace zext
