#pragma once

#include <filesystem>
#include <vector>

#include "ags/common/image.hpp"

namespace ags::harness {

inline constexpr double kTumDepthScale = 5000.0;
inline constexpr double kTumMaxTimeDifference = 0.02;

struct TumSequence {
    std::vector<Frame> frames;  // timestamp order, gt_pose set (world-to-camera)
    std::size_t skipped = 0;    // rgb rows without a depth or pose partner
};

// Reads a TUM RGB-D directory (rgb.txt, depth.txt, groundtruth.txt). Each
// rgb row is paired with the nearest depth and pose rows; rows further than
// `max_dt` seconds apart are skipped. Throws std::runtime_error when an
// index file is missing or an image cannot be decoded.
TumSequence load_tum_rgbd(const std::filesystem::path& dir, double max_dt = kTumMaxTimeDifference);

// Writes frames in the same layout: 8-bit RGB PNGs, 16-bit depth PNGs in
// 1/5000 m, and the three index files. Frames without gt_pose get identity.
void export_tum_rgbd(const std::filesystem::path& dir, const std::vector<Frame>& frames);

// 8-bit RGB PNG helpers; colour is stored as round(255 * clamp(c, 0, 1)).
ImageRGB read_rgb_png(const std::filesystem::path& path);
void write_rgb_png(const std::filesystem::path& path, const ImageRGB& image);

// A trajectory in TUM text format: "timestamp tx ty tz qx qy qz qw" with
// camera-to-world poses. In memory the poses are world-to-camera.
struct StampedPose {
    double timestamp = 0.0;
    Pose pose;
};
std::vector<StampedPose> read_trajectory(const std::filesystem::path& path);
void write_trajectory(const std::filesystem::path& path, const std::vector<StampedPose>& poses);

// Block-averages colour and valid depth by an integer factor.
Frame downsample(const Frame& frame, int factor);

}  // namespace ags::harness
