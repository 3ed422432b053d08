#include "ags/common/align.hpp"

#include <stdexcept>

#include <Eigen/SVD>

namespace ags {

Pose rigid_align(std::span<const Vec3> src, std::span<const Vec3> dst) {
    if (src.size() != dst.size() || src.empty()) throw std::invalid_argument("rigid_align: bad correspondence sets");
    const double n = static_cast<double>(src.size());
    Vec3 mu_s = Vec3::Zero(), mu_d = Vec3::Zero();
    for (std::size_t i = 0; i < src.size(); ++i) {
        mu_s += src[i];
        mu_d += dst[i];
    }
    mu_s /= n;
    mu_d /= n;
    Mat3 cov = Mat3::Zero();
    for (std::size_t i = 0; i < src.size(); ++i) cov += (dst[i] - mu_d) * (src[i] - mu_s).transpose();
    const Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 s = Mat3::Identity();
    if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) s(2, 2) = -1.0;
    Pose out;
    out.R = svd.matrixU() * s * svd.matrixV().transpose();
    out.t = mu_d - out.R * mu_s;
    return out;
}

}  // namespace ags
