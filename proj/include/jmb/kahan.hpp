#pragma once

#include <cmath>

#include "jmb/types.hpp"

namespace jmb {

// Neumaier-compensated scalar accumulator. Keeps sample averages accurate to
// a few ulps for sample sizes up to at least 1e4.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// Coefficient-wise compensated accumulator for complex matrices/vectors.
class KahanCMat {
  public:
    KahanCMat(Eigen::Index rows, Eigen::Index cols)
        : sum_(CMat::Zero(rows, cols)), comp_(CMat::Zero(rows, cols)) {}

    void add(const CMat& x) {
        for (Eigen::Index j = 0; j < sum_.cols(); ++j)
            for (Eigen::Index i = 0; i < sum_.rows(); ++i) {
                add_one(sum_(i, j), comp_(i, j), x(i, j));
            }
    }
    CMat value() const { return sum_ + comp_; }

  private:
    static void add_one(cplx& s, cplx& c, const cplx& x) {
        double sr = s.real(), si = s.imag();
        double cr = c.real(), ci = c.imag();
        add_comp(sr, cr, x.real());
        add_comp(si, ci, x.imag());
        s = {sr, si};
        c = {cr, ci};
    }
    static void add_comp(double& s, double& c, double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }

    CMat sum_;
    CMat comp_;
};

}  // namespace jmb
