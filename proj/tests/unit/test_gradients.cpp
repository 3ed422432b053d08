#include <gtest/gtest.h>

#include "ags/splat/gradients.hpp"
#include "ags/splat/optimize.hpp"
#include "support/fd.hpp"
#include "support/scenes.hpp"

using namespace ags;
using namespace ags::splat;

namespace {

Frame observe(const Scene& scene, const Pose& pose, const CameraIntrinsics& intr) {
    const auto r = render_frame(scene, pose, intr);
    Frame f;
    f.rgb = r.color;
    f.depth = r.depth;
    return f;
}

}  // namespace

TEST(Loss, ZeroWhenRenderMatches) {
    Rng rng(1);
    const auto intr = oracle::small_camera(16, 16);
    const Scene scene = oracle::random_scene(rng, 5, intr);
    const Frame f = observe(scene, Pose::identity(), intr);
    EXPECT_EQ(photometric_depth_loss(f.rgb, f.depth, f), 0.0);
}

TEST(Loss, ConstantColourOffset) {
    Frame f;
    f.rgb = ImageRGB(8, 4, Vec3(0.2, 0.3, 0.4));
    f.depth = ImageDepth(8, 4, 1.0);
    ImageRGB c = f.rgb;
    for (auto& v : c.data) v += Vec3::Constant(0.1);
    EXPECT_NEAR(photometric_depth_loss(c, f.depth, f, 0.0), 0.3, 1e-12);
}

TEST(Loss, DepthTermUsesValidPixelsOnly) {
    Frame f;
    f.rgb = ImageRGB(2, 1, Vec3::Zero());
    f.depth = ImageDepth(2, 1, 0.0);
    f.depth(0, 0) = 2.0;
    ImageDepth d(2, 1, 5.0);
    EXPECT_DOUBLE_EQ(photometric_depth_loss(f.rgb, d, f, 0.5), 0.5 * 3.0);
}

TEST(Loss, NonNegative) {
    Rng rng(2);
    Frame f;
    f.rgb = ImageRGB(4, 4);
    f.depth = ImageDepth(4, 4);
    ImageRGB c(4, 4);
    ImageDepth d(4, 4);
    for (int i = 0; i < 16; ++i) {
        f.rgb.data[i] = Vec3(rng.uniform(), rng.uniform(), rng.uniform());
        c.data[i] = Vec3(rng.uniform(), rng.uniform(), rng.uniform());
        f.depth.data[i] = rng.uniform(-1, 3);
        d.data[i] = rng.uniform(0, 3);
    }
    EXPECT_GE(photometric_depth_loss(c, d, f), 0.0);
}

TEST(Gradients, ZeroWhenLossIsZero) {
    Rng rng(3);
    const auto intr = oracle::small_camera(16, 16);
    const Scene scene = oracle::random_scene(rng, 5, intr);
    const Frame f = observe(scene, Pose::identity(), intr);
    const auto res = loss_and_gradients(scene, Pose::identity(), intr, f);
    for (const auto& g : res.gaussians) EXPECT_TRUE(g.is_zero());
    EXPECT_TRUE(res.pose.isZero(0.0));
}

TEST(Gradients, CulledGaussianHasZeroGradient) {
    Rng rng(4);
    const auto intr = oracle::small_camera(16, 16);
    Scene scene = oracle::random_scene(rng, 4, intr);
    Gaussian3D behind;
    behind.id = 999;
    behind.mu = Vec3(0, 0, -1);
    scene.push_back(behind);
    Frame f = observe(scene, Pose::identity(), intr);
    for (auto& c : f.rgb.data) c = Vec3::Constant(0.5);
    const auto g = gaussian_gradients(scene, Pose::identity(), intr, f);
    EXPECT_TRUE(g.back().is_zero());
    EXPECT_FALSE(g.front().is_zero());
}

TEST(Gradients, MatchFiniteDifferences) {
    Rng rng(5);
    const auto intr = oracle::small_camera(16, 16);
    for (int trial = 0; trial < 5; ++trial) {
        const Scene gt = oracle::random_scene(rng, 5, intr);
        const Frame obs = observe(gt, Pose::identity(), intr);
        Scene scene = gt;
        for (auto& g : scene) {
            g.mu += Vec3(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05));
            g.color = (g.color + Vec3::Constant(0.1)).cwiseMin(1.0);
            g.opacity *= 0.9;
        }
        const Pose pose = oracle::small_random_pose(rng, 0.02, 0.03);
        std::size_t checked = 0;
        const auto bad = oracle::check_gradients_fd(scene, pose, intr, obs, kDefaultDepthWeight, &checked);
        EXPECT_EQ(checked, 5u * 14u + 6u);
        for (const auto& m : bad) ADD_FAILURE() << m.what << " analytic=" << m.analytic << " fd=" << m.numeric;
    }
}

TEST(Gradients, SerialAndParallelBitIdentical) {
    Rng rng(6);
    const auto intr = oracle::small_camera(48, 32);
    const Scene gt = oracle::random_scene(rng, 80, intr);
    const Frame obs = observe(gt, Pose::identity(), intr);
    const Pose pose = oracle::small_random_pose(rng, 0.01, 0.02);
    GradientOptions serial;
    serial.render.exec = Exec::kSerial;
    const auto a = loss_and_gradients(gt, pose, intr, obs, serial);
    const auto b = loss_and_gradients(gt, pose, intr, obs);
    EXPECT_EQ(a.gaussians, b.gaussians);
    EXPECT_EQ(a.pose, b.pose);
}

TEST(PoseGradient, TranslationDominatesForLateralShift) {
    const auto intr = oracle::small_camera(32, 32);
    Gaussian3D g;
    g.mu = Vec3(0, 0, 2);
    g.scale = Vec3::Constant(0.2);
    g.color = Vec3::Ones();
    g.opacity = 0.9;
    const Frame obs = observe({g}, Pose::identity(), intr);
    Pose shifted;
    shifted.t = Vec3(0.05, 0, 0);
    GradientOptions opt;
    opt.lambda_depth = 0.0;
    const Vec6 grad = pose_gradient({g}, shifted, intr, obs, opt);
    // Moving the splat back toward -x lowers the loss.
    EXPECT_GT(grad[0], 0.0);
    EXPECT_GT(std::abs(grad[0]), std::abs(grad[1]));
    EXPECT_GT(std::abs(grad[0]), std::abs(grad[2]));
}

TEST(Update, ZeroGradientLeavesSceneUnchanged) {
    Rng rng(7);
    const auto intr = oracle::small_camera(16, 16);
    const Scene scene = oracle::random_scene(rng, 5, intr);
    std::vector<GaussianGradient> zero(scene.size());
    EXPECT_EQ(update_gaussians(scene, zero, LearningRates{}), scene);
}

TEST(Update, ColourStepReducesLoss) {
    const auto intr = oracle::small_camera(16, 16);
    Gaussian3D g;
    g.mu = Vec3(0, 0, 2);
    g.scale = Vec3::Constant(0.3);
    g.color = Vec3(0.2, 0.2, 0.2);
    Frame obs = observe({g}, Pose::identity(), intr);
    Scene scene = {g};
    scene[0].color = Vec3(0.8, 0.5, 0.1);
    const auto res = loss_and_gradients(scene, Pose::identity(), intr, obs);
    LearningRates lr;
    lr.color = 1.0;
    const Scene next = update_gaussians(scene, res.gaussians, lr);
    const auto after = render_frame(next, Pose::identity(), intr);
    EXPECT_LT(photometric_depth_loss(after.color, after.depth, obs), res.loss);
}

TEST(Update, QuaternionStaysUnitAndRangesClamped) {
    Rng rng(8);
    const auto intr = oracle::small_camera(16, 16);
    const Scene scene = oracle::random_scene(rng, 5, intr);
    std::vector<GaussianGradient> grads(scene.size());
    for (auto& g : grads) {
        g.rotation = Vec4(rng.normal(), rng.normal(), rng.normal(), rng.normal());
        g.opacity = rng.normal() * 100;
        g.color = Vec3::Constant(rng.normal() * 100);
        g.scale = Vec3::Constant(1e6);
    }
    for (const auto& g : update_gaussians(scene, grads, LearningRates{})) {
        EXPECT_NEAR(g.rotation.norm(), 1.0, 1e-12);
        EXPECT_TRUE(g.is_valid());
        EXPECT_EQ(g.scale, Vec3::Constant(kMinScale));
    }
}

TEST(Densify, FullyCoveredFrameAddsNothing) {
    const auto intr = oracle::small_camera(8, 8);
    Frame f;
    f.rgb = ImageRGB(8, 8, Vec3::Ones());
    f.depth = ImageDepth(8, 8, 2.0);
    RenderAux aux;
    aux.final_T = ImageDepth(8, 8, 0.4);
    EXPECT_TRUE(densify({}, f, Pose::identity(), intr, aux).empty());
}

TEST(Densify, EmptyMapGetsOnePerBlock) {
    const auto intr = oracle::small_camera(8, 8);
    Frame f;
    f.rgb = ImageRGB(8, 8, Vec3(0.1, 0.2, 0.3));
    f.depth = ImageDepth(8, 8, 2.0);
    const auto r = render_frame({}, Pose::identity(), intr);
    const Scene out = densify({}, f, Pose::identity(), intr, r.aux);
    ASSERT_EQ(out.size(), 4u);
    for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(out[i].id, i);
        EXPECT_EQ(out[i].color, Vec3(0.1, 0.2, 0.3));
        EXPECT_DOUBLE_EQ(out[i].opacity, 0.5);
    }
}

TEST(Densify, NewGaussianReprojectsToSourcePixel) {
    Rng rng(9);
    const auto intr = oracle::small_camera(16, 12);
    Frame f;
    f.rgb = ImageRGB(16, 12, Vec3::Constant(0.5));
    f.depth = ImageDepth(16, 12, 0.0);
    f.depth(5, 6) = 2.7;
    const Pose pose = oracle::small_random_pose(rng);
    const auto r = render_frame({}, pose, intr);
    const Scene out = densify({}, f, pose, intr, r.aux);
    ASSERT_EQ(out.size(), 1u);
    const auto proj = project_gaussians(out, pose, intr);
    ASSERT_EQ(proj.size(), 1u);
    EXPECT_LT((proj[0].mean - Vec2(5, 6)).norm(), 0.5);
}

TEST(Densify, ColourErrorPicksWorstCoveredPixel) {
    const auto intr = oracle::small_camera(4, 4);
    Frame f;
    f.rgb = ImageRGB(4, 4, Vec3::Constant(0.5));
    f.depth = ImageDepth(4, 4, 2.0);
    f.rgb(2, 1) = Vec3(1.0, 0.5, 0.5);
    f.rgb(3, 3) = Vec3(0.9, 0.5, 0.5);
    RenderAux aux;
    aux.final_T = ImageDepth(4, 4, 0.1);
    const ImageRGB rendered(4, 4, Vec3::Constant(0.5));
    const Scene out = densify({}, f, Pose::identity(), intr, aux, DensifyOptions{}, &rendered);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].color, Vec3(1.0, 0.5, 0.5));
    const auto proj = project_gaussians(out, Pose::identity(), intr);
    EXPECT_LT((proj[0].mean - Vec2(2, 1)).norm(), 1e-9);

    DensifyOptions off;
    off.color_error_threshold = 0.0;
    EXPECT_TRUE(densify({}, f, Pose::identity(), intr, aux, off, &rendered).empty());
    Image<std::uint8_t> frozen(4, 4, 0);
    frozen(2, 1) = 1;
    const Scene masked = densify({}, f, Pose::identity(), intr, aux, DensifyOptions{}, &rendered, &frozen);
    ASSERT_EQ(masked.size(), 1u);
    EXPECT_EQ(masked[0].color, Vec3(0.9, 0.5, 0.5));
}
