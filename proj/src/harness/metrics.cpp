#include "ags/harness/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ags/common/align.hpp"

namespace ags::harness {

double ate_rmse(std::span<const Vec3> estimated, std::span<const Vec3> reference) {
    if (estimated.size() != reference.size()) throw std::invalid_argument("ate_rmse: trajectory lengths differ");
    if (estimated.size() < 2) throw std::invalid_argument("ate_rmse: need at least two positions");
    const Pose align = rigid_align(estimated, reference);
    double sum = 0.0;
    for (std::size_t i = 0; i < estimated.size(); ++i) sum += (align.transform(estimated[i]) - reference[i]).squaredNorm();
    return std::sqrt(sum / static_cast<double>(estimated.size()));
}

double ate_rmse(std::span<const Pose> estimated, std::span<const Pose> reference) {
    std::vector<Vec3> est, ref;
    for (const Pose& p : estimated) est.push_back(p.center());
    for (const Pose& p : reference) ref.push_back(p.center());
    return ate_rmse(std::span<const Vec3>(est), std::span<const Vec3>(ref));
}

double psnr(const ImageRGB& rendered, const ImageRGB& reference) {
    if (!rendered.same_shape(reference)) throw std::invalid_argument("psnr: image dimensions differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < rendered.size(); ++i) sum += (rendered.data[i] - reference.data[i]).squaredNorm();
    const double mse = sum / (3.0 * static_cast<double>(rendered.size()));
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

}  // namespace ags::harness
