#include "ags/common/pose.hpp"

#include <cmath>

namespace ags {

Pose Pose::exp(const Vec6& xi) {
    const Vec3 rho = xi.head<3>();
    const Vec3 omega = xi.tail<3>();
    const double theta = omega.norm();
    const Mat3 w = skew(omega);
    Mat3 v;
    if (theta < 1e-8) {
        v = Mat3::Identity() + 0.5 * w + w * w / 6.0;
    } else {
        const double t2 = theta * theta;
        v = Mat3::Identity() + (1.0 - std::cos(theta)) / t2 * w + (theta - std::sin(theta)) / (t2 * theta) * w * w;
    }
    return {so3_exp(omega), v * rho};
}

bool Pose::is_valid(double tol) const {
    if (!R.allFinite() || !t.allFinite()) return false;
    if ((R * R.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(R.determinant() - 1.0) <= tol;
}

}  // namespace ags
