#include "chaincalc/matrix.hpp"

#include <atomic>
#include <stdexcept>

#ifdef CHAINCALC_HAVE_OPENMP
#include <omp.h>
#endif

namespace chaincalc {

QMat QMat::identity(size_t n) {
    QMat m(n, n);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = Rat(1);
    return m;
}

QMat QMat::operator*(const QMat& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("QMat: shape mismatch in product");
    QMat r(rows_, o.cols_);
    for (size_t i = 0; i < rows_; ++i)
        for (size_t k = 0; k < cols_; ++k) {
            const Rat& v = at(i, k);
            if (v.is_zero()) continue;
            for (size_t j = 0; j < o.cols_; ++j) {
                const Rat& w = o.at(k, j);
                if (!w.is_zero()) r.at(i, j) += v * w;
            }
        }
    return r;
}

QMat QMat::operator+(const QMat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("QMat: shape mismatch in sum");
    QMat r(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
    return r;
}

QMat QMat::operator-(const QMat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("QMat: shape mismatch in difference");
    QMat r(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
    return r;
}

QMat QMat::scaled(const Rat& c) const {
    QMat r = *this;
    for (auto& v : r.a_) v *= c;
    return r;
}

QMat QMat::transpose() const {
    QMat r(cols_, rows_);
    for (size_t i = 0; i < rows_; ++i)
        for (size_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
}

QMat QMat::hcat(const QMat& o) const {
    if (rows_ != o.rows_) throw std::invalid_argument("QMat: hcat row mismatch");
    QMat r(rows_, cols_ + o.cols_);
    for (size_t i = 0; i < rows_; ++i) {
        for (size_t j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
        for (size_t j = 0; j < o.cols_; ++j) r.at(i, cols_ + j) = o.at(i, j);
    }
    return r;
}

QMat QMat::vcat(const QMat& o) const {
    if (cols_ != o.cols_) throw std::invalid_argument("QMat: vcat col mismatch");
    QMat r(rows_ + o.rows_, cols_);
    for (size_t i = 0; i < rows_; ++i)
        for (size_t j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
    for (size_t i = 0; i < o.rows_; ++i)
        for (size_t j = 0; j < cols_; ++j) r.at(rows_ + i, j) = o.at(i, j);
    return r;
}

QMat QMat::sub(size_t r0, size_t c0, size_t nr, size_t nc) const {
    QMat r(nr, nc);
    for (size_t i = 0; i < nr; ++i)
        for (size_t j = 0; j < nc; ++j) r.at(i, j) = at(r0 + i, c0 + j);
    return r;
}

bool QMat::is_zero() const {
    for (const auto& v : a_)
        if (!v.is_zero()) return false;
    return true;
}

namespace {
std::atomic<bool> g_parallel{true};

// pivot preference: fewest limbs fights coefficient growth and is identical
// across the serial and parallel kernels
size_t entry_weight(const Rat& v) { return v.num().limbs() + v.den().limbs(); }

template <bool Omp>
size_t rref_impl(QMat& m, std::vector<size_t>* pivots) {
    const size_t rows = m.rows(), cols = m.cols();
    size_t rank = 0;
    if (pivots) pivots->clear();
    for (size_t col = 0; col < cols && rank < rows; ++col) {
        size_t piv = rows;
        size_t best = 0;
        for (size_t i = rank; i < rows; ++i)
            if (!m.at(i, col).is_zero()) {
                size_t w = entry_weight(m.at(i, col));
                if (piv == rows || w < best) {
                    piv = i;
                    best = w;
                }
            }
        if (piv == rows) continue;
        if (piv != rank)
            for (size_t j = col; j < cols; ++j) std::swap(m.at(piv, j), m.at(rank, j));
        Rat inv = m.at(rank, col).inv();
        for (size_t j = col; j < cols; ++j) m.at(rank, j) *= inv;
        auto eliminate = [&](size_t i) {
            if (i == rank) return;
            Rat f = m.at(i, col);
            if (f.is_zero()) return;
            for (size_t j = col; j < cols; ++j) m.at(i, j) -= f * m.at(rank, j);
        };
        if constexpr (Omp) {
#ifdef CHAINCALC_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 4)
            for (long long i = 0; i < static_cast<long long>(rows); ++i) eliminate(static_cast<size_t>(i));
#else
            for (size_t i = 0; i < rows; ++i) eliminate(i);
#endif
        } else {
            for (size_t i = 0; i < rows; ++i) eliminate(i);
        }
        if (pivots) pivots->push_back(col);
        ++rank;
    }
    return rank;
}
}  // namespace

void set_parallel_kernels(bool on) { g_parallel = on; }
bool parallel_kernels() { return g_parallel; }

size_t rref_serial(QMat& m, std::vector<size_t>* pivots) { return rref_impl<false>(m, pivots); }
size_t rref_omp(QMat& m, std::vector<size_t>* pivots) { return rref_impl<true>(m, pivots); }

size_t rref(QMat& m, std::vector<size_t>* pivots) {
    return g_parallel ? rref_omp(m, pivots) : rref_serial(m, pivots);
}

namespace {

// Fraction-free Bareiss elimination: exact integer arithmetic with
// determinant-bounded growth; rank only.
size_t rank_bareiss(const QMat& m0) {
    const size_t rows = m0.rows(), cols = m0.cols();
    if (rows == 0 || cols == 0) return 0;
    std::vector<std::vector<BigInt>> a(rows, std::vector<BigInt>(cols));
    for (size_t i = 0; i < rows; ++i) {
        BigInt l(1);
        for (size_t j = 0; j < cols; ++j) {
            BigInt d = m0.at(i, j).den();
            BigInt g = BigInt::gcd(l, d);
            l = l * (d / g);
        }
        for (size_t j = 0; j < cols; ++j) {
            const Rat& v = m0.at(i, j);
            a[i][j] = v.num() * (l / v.den());
        }
    }
    BigInt prev(1);
    size_t rank = 0;
    for (size_t col = 0; col < cols && rank < rows; ++col) {
        size_t piv = rows;
        size_t best = 0;
        for (size_t i = rank; i < rows; ++i)
            if (!a[i][col].is_zero()) {
                size_t w = a[i][col].limbs();
                if (piv == rows || w < best) {
                    piv = i;
                    best = w;
                }
            }
        if (piv == rows) continue;
        if (piv != rank) std::swap(a[piv], a[rank]);
        for (size_t i = rank + 1; i < rows; ++i) {
            for (size_t j = cols; j-- > col;) {
                BigInt t = a[i][j] * a[rank][col] - a[i][col] * a[rank][j];
                a[i][j] = t / prev;  // exact by Sylvester's identity
            }
        }
        prev = a[rank][col];
        ++rank;
    }
    return rank;
}

}  // namespace

size_t rank(QMat m) { return rank_bareiss(m); }

QMat kernel_basis(QMat m) {
    const size_t cols = m.cols();
    std::vector<size_t> pivots;
    size_t r = rref(m, &pivots);
    std::vector<bool> is_pivot(cols, false);
    for (size_t p : pivots) is_pivot[p] = true;
    size_t k = cols - r;
    QMat basis(cols, k);
    size_t out = 0;
    for (size_t free_col = 0; free_col < cols; ++free_col) {
        if (is_pivot[free_col]) continue;
        basis.at(free_col, out) = Rat(1);
        for (size_t i = 0; i < pivots.size(); ++i) basis.at(pivots[i], out) = -m.at(i, free_col);
        ++out;
    }
    return basis;
}

std::optional<std::vector<Rat>> solve(QMat a, const std::vector<Rat>& b) {
    const size_t rows = a.rows(), cols = a.cols();
    if (b.size() != rows) throw std::invalid_argument("solve: rhs size mismatch");
    QMat aug(rows, cols + 1);
    for (size_t i = 0; i < rows; ++i) {
        for (size_t j = 0; j < cols; ++j) aug.at(i, j) = a.at(i, j);
        aug.at(i, cols) = b[i];
    }
    std::vector<size_t> pivots;
    rref(aug, &pivots);
    for (size_t i = 0; i < pivots.size(); ++i)
        if (pivots[i] == cols) return std::nullopt;  // inconsistent
    std::vector<Rat> x(cols, Rat(0));
    for (size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = aug.at(i, cols);
    return x;
}

std::optional<QMat> inverse(QMat m) {
    if (m.rows() != m.cols()) return std::nullopt;
    size_t n = m.rows();
    QMat aug = m.hcat(QMat::identity(n));
    std::vector<size_t> pivots;
    size_t r = rref(aug, &pivots);
    if (r != n) return std::nullopt;
    for (size_t i = 0; i < n; ++i)
        if (pivots[i] != i) return std::nullopt;
    return aug.sub(0, n, n, n);
}

}  // namespace chaincalc
