#include "lsmmn/procrustes.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace lsmmn {

namespace {

Matrix centred(const Coordinates& x) {
    Matrix c = x;
    c.rowwise() -= c.colwise().mean();
    return c;
}

void check_shapes(const Coordinates& a, const Coordinates& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("procrustes configurations differ in shape");
    if (a.rows() < 2) throw DimensionError("procrustes needs at least two points");
}

}  // namespace

double procrustes_correlation(const Coordinates& a, const Coordinates& b) {
    check_shapes(a, b);
    Matrix ca = centred(a);
    Matrix cb = centred(b);
    const double na = ca.norm();
    const double nb = cb.norm();
    if (!(na > 0.0) || !(nb > 0.0)) throw DomainError("degenerate configuration: all points coincide");
    ca /= na;
    cb /= nb;
    const Matrix cross = ca.transpose() * cb;
    Eigen::JacobiSVD<Matrix> svd(cross);
    const double r = svd.singularValues().sum();
    return std::clamp(r, 0.0, 1.0);
}

Coordinates procrustes_align(const Coordinates& target, const Coordinates& x) {
    check_shapes(target, x);
    const Eigen::RowVectorXd target_mean = target.colwise().mean();
    const Matrix ct = centred(target);
    const Matrix cx = centred(x);
    Eigen::JacobiSVD<Matrix> svd(cx.transpose() * ct, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Matrix rotation = svd.matrixU() * svd.matrixV().transpose();
    Coordinates out = cx * rotation;
    out.rowwise() += target_mean;
    return out;
}

}  // namespace lsmmn
