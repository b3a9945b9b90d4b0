#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "chaincalc/rational.hpp"

namespace chaincalc {

// Dense matrix over Q.
class QMat {
public:
    QMat() = default;
    QMat(size_t rows, size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    static QMat identity(size_t n);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    Rat& at(size_t i, size_t j) { return a_[i * cols_ + j]; }
    const Rat& at(size_t i, size_t j) const { return a_[i * cols_ + j]; }

    QMat operator*(const QMat& o) const;
    QMat operator+(const QMat& o) const;
    QMat operator-(const QMat& o) const;
    QMat scaled(const Rat& c) const;
    QMat transpose() const;
    bool operator==(const QMat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

    QMat hcat(const QMat& o) const;
    QMat vcat(const QMat& o) const;
    QMat sub(size_t r0, size_t c0, size_t nr, size_t nc) const;
    bool is_zero() const;

private:
    size_t rows_ = 0, cols_ = 0;
    std::vector<Rat> a_;
};

// Row echelon kernels. The OpenMP variant eliminates rows in parallel and is
// pivot-identical to the serial reference; `set_parallel_kernels` selects which
// one backs the generic entry points.
void set_parallel_kernels(bool on);
bool parallel_kernels();

size_t rref_serial(QMat& m, std::vector<size_t>* pivots = nullptr);
size_t rref_omp(QMat& m, std::vector<size_t>* pivots = nullptr);
size_t rref(QMat& m, std::vector<size_t>* pivots = nullptr);

size_t rank(QMat m);

// Deterministic kernel basis: one vector per free column, free variable set to 1,
// ordered by free column index. Returned as columns of a cols x k matrix.
QMat kernel_basis(QMat m);

// Solve A x = b; returns one solution if consistent.
std::optional<std::vector<Rat>> solve(QMat a, const std::vector<Rat>& b);

std::optional<QMat> inverse(QMat m);

}  // namespace chaincalc
