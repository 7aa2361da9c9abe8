#include "zext/field.hpp"

#include <stdexcept>

namespace zext {

PrimeFieldMatrix PrimeFieldMatrix::zero(int rows, int cols, uint64_t p) {
    PrimeFieldMatrix m;
    m.p = p;
    m.rows = rows;
    m.cols = cols;
    m.a.assign(rows, std::vector<uint64_t>(cols, 0));
    m.col_labels.assign(cols, -1);
    return m;
}

uint64_t f_add(uint64_t x, uint64_t y, uint64_t p) { return (x + y) % p; }
uint64_t f_sub(uint64_t x, uint64_t y, uint64_t p) { return (x + p - y) % p; }
uint64_t f_mul(uint64_t x, uint64_t y, uint64_t p) { return (x * y) % p; }

uint64_t f_pow(uint64_t x, uint64_t e, uint64_t p) {
    uint64_t r = 1 % p;
    x %= p;
    while (e) {
        if (e & 1) r = f_mul(r, x, p);
        x = f_mul(x, x, p);
        e >>= 1;
    }
    return r;
}

uint64_t f_inv(uint64_t x, uint64_t p) {
    if (x % p == 0) throw std::domain_error("field inverse of zero");
    return f_pow(x, p - 2, p);
}

namespace {

// In-place elimination; returns pivot columns.
std::vector<int> eliminate(std::vector<std::vector<uint64_t>>& a, uint64_t p) {
    int rows = static_cast<int>(a.size());
    int cols = rows ? static_cast<int>(a[0].size()) : 0;
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < cols && r < rows; c++) {
        int sel = -1;
        for (int i = r; i < rows; i++)
            if (a[i][c] % p != 0) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        std::swap(a[r], a[sel]);
        uint64_t inv = f_inv(a[r][c], p);
        for (int j = c; j < cols; j++) a[r][j] = f_mul(a[r][j], inv, p);
        for (int i = 0; i < rows; i++) {
            if (i == r || a[i][c] % p == 0) continue;
            uint64_t f = a[i][c];
            for (int j = c; j < cols; j++) a[i][j] = f_sub(a[i][j], f_mul(f, a[r][j], p), p);
        }
        pivots.push_back(c);
        r++;
    }
    return pivots;
}

}  // namespace

int field_rank(const PrimeFieldMatrix& m, const std::vector<int>& cols) {
    std::vector<std::vector<uint64_t>> sel(m.rows, std::vector<uint64_t>(cols.size()));
    for (int i = 0; i < m.rows; i++)
        for (size_t j = 0; j < cols.size(); j++) sel[i][j] = m.a[i][cols[j]];
    return static_cast<int>(eliminate(sel, m.p).size());
}

int field_rank(const PrimeFieldMatrix& m) {
    std::vector<int> all(m.cols);
    for (int j = 0; j < m.cols; j++) all[j] = j;
    return field_rank(m, all);
}

PrimeFieldMatrix row_reduce(const PrimeFieldMatrix& m) {
    auto a = m.a;
    auto pivots = eliminate(a, m.p);
    PrimeFieldMatrix out;
    out.p = m.p;
    out.rows = static_cast<int>(pivots.size());
    out.cols = m.cols;
    out.col_labels = m.col_labels;
    out.a.assign(a.begin(), a.begin() + pivots.size());
    return out;
}

PrimeFieldMatrix dual_representation(const PrimeFieldMatrix& m) {
    auto a = m.a;
    auto pivots = eliminate(a, m.p);
    int r = static_cast<int>(pivots.size());
    if (r != m.rows) throw std::invalid_argument("dual_representation: matrix not full row rank");
    int n = m.cols;
    std::vector<char> is_pivot(n, 0);
    for (int c : pivots) is_pivot[c] = 1;
    std::vector<int> nonpivots;
    for (int c = 0; c < n; c++)
        if (!is_pivot[c]) nonpivots.push_back(c);

    // RREF expresses each non-pivot column in the pivot basis; the dual is
    // [-P^T | I] written back in the original column order.
    PrimeFieldMatrix d = PrimeFieldMatrix::zero(n - r, n, m.p);
    d.col_labels = m.col_labels;
    for (int j = 0; j < n - r; j++) {
        int q = nonpivots[j];
        for (int i = 0; i < r; i++) d.a[j][pivots[i]] = f_sub(0, a[i][q], m.p);
        d.a[j][q] = 1;
    }
    return d;
}

uint64_t minor_det(const PrimeFieldMatrix& m, const std::vector<int>& rows,
                   const std::vector<int>& cols) {
    int k = static_cast<int>(rows.size());
    if (k != static_cast<int>(cols.size())) throw std::invalid_argument("minor_det: not square");
    std::vector<std::vector<uint64_t>> a(k, std::vector<uint64_t>(k));
    for (int i = 0; i < k; i++)
        for (int j = 0; j < k; j++) a[i][j] = m.a[rows[i]][cols[j]];
    uint64_t det = 1;
    for (int c = 0; c < k; c++) {
        int sel = -1;
        for (int i = c; i < k; i++)
            if (a[i][c] % m.p != 0) {
                sel = i;
                break;
            }
        if (sel < 0) return 0;
        if (sel != c) {
            std::swap(a[sel], a[c]);
            det = f_sub(0, det, m.p);
        }
        det = f_mul(det, a[c][c], m.p);
        uint64_t inv = f_inv(a[c][c], m.p);
        for (int i = c + 1; i < k; i++) {
            if (a[i][c] % m.p == 0) continue;
            uint64_t f = f_mul(a[i][c], inv, m.p);
            for (int j = c; j < k; j++) a[i][j] = f_sub(a[i][j], f_mul(f, a[c][j], m.p), m.p);
        }
    }
    return det;
}

}  // namespace zext
