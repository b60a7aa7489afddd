#include "clab/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace clab {

BandedMatrix::BandedMatrix(int n, int lower, int upper)
    : n_(n), kl_(lower), ku_(upper), ld_(2 * lower + upper + 1) {
    ab_.assign(static_cast<size_t>(ld_) * n_, 0.0);
}

size_t BandedMatrix::index(int i, int j) const {
    const int band_row = kl_ + ku_ + i - j;
    return static_cast<size_t>(j) * ld_ + band_row;
}

double BandedMatrix::norm_inf() const {
    double best = 0.0;
    for (int i = 0; i < n_; ++i) {
        double row = 0.0;
        const int j_lo = std::max(0, i - kl_);
        const int j_hi = std::min(n_ - 1, i + ku_);
        for (int j = j_lo; j <= j_hi; ++j) row += std::abs(get(i, j));
        best = std::max(best, row);
    }
    return best;
}

void BandedMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (int i = 0; i < n_; ++i) {
        double acc = 0.0;
        const int j_lo = std::max(0, i - kl_);
        const int j_hi = std::min(n_ - 1, i + ku_);
        for (int j = j_lo; j <= j_hi; ++j) acc += get(i, j) * x[static_cast<size_t>(j)];
        y[static_cast<size_t>(i)] = acc;
    }
}

BandedLU::BandedLU(const BandedMatrix& a) : f_(a), pivot_(static_cast<size_t>(a.size())) {
    norm_inf_a_ = a.norm_inf();
    min_pivot_ = std::numeric_limits<double>::infinity();

    const int n = f_.n_;
    const int kl = f_.kl_;
    const int ku = f_.ku_;
    const int fill_band = kl + ku;  // widest superdiagonal after pivoting

    for (int j = 0; j < n; ++j) {
        const int i_max = std::min(n - 1, j + kl);
        int p = j;
        double best = std::abs(f_.get(j, j));
        for (int i = j + 1; i <= i_max; ++i) {
            const double v = std::abs(f_.get(i, j));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        pivot_[static_cast<size_t>(j)] = p;
        if (best == 0.0) {
            singular_ = true;
            min_pivot_ = 0.0;
            return;
        }
        if (p != j) {
            const int j_hi = std::min(n - 1, j + fill_band);
            for (int jj = j; jj <= j_hi; ++jj) std::swap(f_.at(j, jj), f_.at(p, jj));
        }
        const double piv = f_.get(j, j);
        min_pivot_ = std::min(min_pivot_, std::abs(piv));
        for (int i = j + 1; i <= i_max; ++i) {
            const double m = f_.get(i, j) / piv;
            f_.at(i, j) = m;
            const int j_hi = std::min(n - 1, j + fill_band);
            for (int jj = j + 1; jj <= j_hi; ++jj) f_.at(i, jj) -= m * f_.get(j, jj);
        }
    }
}

void BandedLU::solve(std::span<double> rhs) const {
    if (singular_) throw std::runtime_error("banded solve on a singular factorization");
    const int n = f_.n_;
    const int kl = f_.kl_;
    const int fill_band = f_.kl_ + f_.ku_;

    for (int j = 0; j < n; ++j) {
        const int p = pivot_[static_cast<size_t>(j)];
        if (p != j) std::swap(rhs[static_cast<size_t>(j)], rhs[static_cast<size_t>(p)]);
        const double bj = rhs[static_cast<size_t>(j)];
        const int i_max = std::min(n - 1, j + kl);
        for (int i = j + 1; i <= i_max; ++i) rhs[static_cast<size_t>(i)] -= f_.get(i, j) * bj;
    }
    for (int j = n - 1; j >= 0; --j) {
        double v = rhs[static_cast<size_t>(j)] / f_.get(j, j);
        rhs[static_cast<size_t>(j)] = v;
        const int i_lo = std::max(0, j - fill_band);
        for (int i = i_lo; i < j; ++i) rhs[static_cast<size_t>(i)] -= f_.get(i, j) * v;
    }
}

double BandedLU::condition_estimate() const {
    if (singular_ || min_pivot_ == 0.0) return std::numeric_limits<double>::infinity();
    return norm_inf_a_ / min_pivot_;
}

}  // namespace clab
