#include "doctest.h"

#include <stdexcept>

#include "rwave/field.hpp"
#include "rwave/noise.hpp"
#include "rwave/norms.hpp"
#include "rwave/rng.hpp"

#include <cmath>
#include <sstream>
#include <vector>

using namespace rwave;

namespace {

GridSpec line_grid(std::size_t x_count, double dx, double x0, std::size_t t_count = 1,
                   double dt = 1.0) {
    GridSpec g;
    g.t_count = t_count;
    g.x_count = x_count;
    g.dt = dt;
    g.dx = dx;
    g.t0 = 0.0;
    g.x0 = x0;
    g.validate();
    return g;
}

// Ensemble of n views onto one shared deterministic field.
std::vector<FieldView> replicated(const Field& f, std::size_t n) {
    return std::vector<FieldView>(n, f.view());
}

Field indicator_field(const GridSpec& grid) {
    Field f(grid);
    for (std::size_t j = 0; j < grid.x_count; ++j) {
        const double x = grid.x(j);
        if (x >= 0.0 && x <= 1.0)
            for (std::size_t i = 0; i < grid.t_count; ++i) f.at(i, j) = 1.0;
    }
    return f;
}

} // namespace

TEST_CASE("z norm of the unit indicator matches the closed form") {
    // || 1_[0,1] ||_{L^2} = 1 and the squared increment seminorm is
    // 4 [1/(2H) + 1/(1-2H)]; the lag cutoff is pushed far out so only
    // discretization of the lag integral remains.
    const GridSpec grid = line_grid(2305, 0.00390625, -4.0);
    const Field f = indicator_field(grid);
    const auto ensemble = replicated(f, 128);

    for (double hurst : {0.3, 0.4}) {
        NormConfig config;
        config.p = 2.0;
        config.hurst = hurst;
        config.h_max = 1048576.0;
        const ZNormEstimate est = z_norm_estimate(ensemble, config);
        CHECK(est.z1 == doctest::Approx(1.0).epsilon(5e-3));
        const double closed = 4.0 * (1.0 / (2.0 * hurst) + 1.0 / (1.0 - 2.0 * hurst));
        CHECK(est.z2 * est.z2 == doctest::Approx(closed).epsilon(5e-2));
        CHECK(est.z == doctest::Approx(est.z1 + est.z2));
    }
}

TEST_CASE("z norm scales linearly with the field") {
    const GridSpec grid = line_grid(513, 0.015625, -4.0);
    Field f = indicator_field(grid);
    const auto base = z_norm_estimate(replicated(f, 128), NormConfig{});
    for (auto& v : f.values) v *= 3.0;
    const auto scaled = z_norm_estimate(replicated(f, 128), NormConfig{});
    CHECK(scaled.z1 == doctest::Approx(3.0 * base.z1).epsilon(1e-12));
    CHECK(scaled.z2 == doctest::Approx(3.0 * base.z2).epsilon(1e-12));
}

TEST_CASE("z norm is invariant under whole-cell translations") {
    const GridSpec grid = line_grid(1025, 0.0078125, -4.0);
    Field f(grid);
    Field g(grid);
    for (std::size_t j = 0; j < grid.x_count; ++j) {
        const double x = grid.x(j);
        f.at(0, j) = std::exp(-8.0 * x * x);
        const double y = x - 64.0 * grid.dx; // shifted copy, support well inside
        g.at(0, j) = std::exp(-8.0 * y * y);
    }
    NormConfig config;
    config.hurst = 0.35;
    const auto a = z_norm_estimate(replicated(f, 128), config);
    const auto b = z_norm_estimate(replicated(g, 128), config);
    CHECK(a.z1 == doctest::Approx(b.z1).epsilon(1e-12));
    CHECK(a.z2 == doctest::Approx(b.z2).epsilon(1e-12));
}

TEST_CASE("pointwise increment norm of the indicator at the midpoint") {
    // At x = 1/2 the increment is 1 exactly when |h| > 1/2, so the squared
    // norm is 2 int_{1/2}^inf h^{-1-2 beta} dh with beta = 1/2 - H.
    const GridSpec grid = line_grid(2305, 0.00390625, -4.0);
    const Field f = indicator_field(grid);
    const auto ensemble = replicated(f, 128);
    NormConfig config;
    config.p = 2.0;
    config.hurst = 0.15;
    config.h_max = 1048576.0;
    const double two_beta = 2.0 * config.beta();
    const double closed = 2.0 * std::pow(0.5, -two_beta) / two_beta;
    const double got = n_beta_p_estimate(ensemble, config, 0.0, 0.5);
    CHECK(got * got == doctest::Approx(closed).epsilon(6e-2));
}

TEST_CASE("holder fit recovers the slope of a linear field") {
    const GridSpec grid = line_grid(257, 0.015625, -2.0);
    Field f(grid);
    for (std::size_t j = 0; j < grid.x_count; ++j) f.at(0, j) = grid.x(j);
    const HolderFit fit = holder_exponent(replicated(f, 512), Axis::Space, 4.0,
                                          4.0 * grid.dx, 32.0 * grid.dx);
    CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fit.std_error < 1e-10);
}

TEST_CASE("holder fit recovers the exponent of a lacunary cosine sum") {
    // u(x) = sum over modes of w^{-g} cos(w x + phi) with incommensurate
    // frequency ratio: pooled increment moments scale like h^{g p} across
    // lags probing the interior of the mode band.
    const double g = 0.35;
    const GridSpec grid = line_grid(1025, 0.001953125, -1.0);
    Field f(grid);
    for (std::size_t j = 0; j < grid.x_count; ++j) {
        double acc = 0.0;
        double omega = 2.0;
        double phi = 0.0;
        while (omega * grid.dx < 1.2) {
            acc += std::pow(omega, -g) * std::cos(omega * grid.x(j) + phi);
            omega *= 1.6;
            phi += 2.3999632297286535;
        }
        f.at(0, j) = acc;
    }
    const HolderFit fit = holder_exponent(replicated(f, 512), Axis::Space, 4.0,
                                          8.0 * grid.dx, 64.0 * grid.dx);
    CHECK(std::abs(fit.slope - g) < 0.05);
}

TEST_CASE("holder fit recovers the hurst index of fractional noise sums") {
    const std::size_t n = 512, cols = 257;
    const GridSpec grid = line_grid(cols, 0.015625, 0.0);
    NoiseParams params;
    params.hurst = 0.4;
    std::vector<Field> fields;
    fields.reserve(n);
    std::vector<FieldView> views;
    for (std::size_t r = 0; r < n; ++r) {
        params.seed = derive_seed(808, r);
        const NoiseField noise = sample_noise_field(grid, params);
        Field f(grid);
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            acc += noise.at(0, j);
            f.at(0, j) = acc;
        }
        fields.push_back(std::move(f));
    }
    for (const Field& f : fields) views.push_back(f.view());
    const HolderFit fit =
        holder_exponent(views, Axis::Space, 8.0, 4.0 * grid.dx, 32.0 * grid.dx);
    CHECK(fit.slope == doctest::Approx(0.4).epsilon(0.125)); // 0.4 +- 0.05
}

TEST_CASE("holder fit works along the time axis") {
    const GridSpec grid = line_grid(17, 0.25, -2.0, 257, 0.015625);
    Field f(grid);
    for (std::size_t i = 0; i < grid.t_count; ++i)
        for (std::size_t j = 0; j < grid.x_count; ++j) f.at(i, j) = grid.t(i);
    const HolderFit fit = holder_exponent(replicated(f, 512), Axis::Time, 2.0,
                                          4.0 * grid.dt, 32.0 * grid.dt);
    CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("norm estimators reject undersized ensembles and bad configs") {
    const GridSpec grid = line_grid(65, 0.0625, -2.0);
    const Field f = indicator_field(grid);
    CHECK_THROWS_AS(n_beta_p_estimate(replicated(f, 99), NormConfig{}, 0.0, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(holder_exponent(replicated(f, 499), Axis::Space, 4.0, 4.0 * grid.dx,
                                    32.0 * grid.dx),
                    std::invalid_argument);

    NormConfig bad;
    bad.p = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = NormConfig{};
    bad.hurst = 0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = NormConfig{};
    bad.h_min = 2.0;
    bad.h_max = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("non-finite realizations are reported by index") {
    const GridSpec grid = line_grid(33, 0.125, -2.0);
    std::vector<Field> fields(128, indicator_field(grid));
    fields[17].at(0, 5) = std::nan("");
    std::vector<FieldView> views;
    for (const Field& f : fields) views.push_back(f.view());
    bool threw = false;
    try {
        z_norm_estimate(views, NormConfig{});
    } catch (const std::runtime_error& e) {
        threw = true;
        CHECK(std::string(e.what()).find("realization 17") != std::string::npos);
    }
    CHECK(threw);
}

TEST_CASE("fbm normalization squared matches reference values") {
    CHECK(fbm_normalization_squared(0.3) ==
          doctest::Approx(8.30025793167526033e-02).epsilon(1e-9));
    CHECK(fbm_normalization_squared(0.35) ==
          doctest::Approx(6.48465945214307116e-02).epsilon(1e-9));
    CHECK(fbm_normalization_squared(0.45) ==
          doctest::Approx(2.36860830094696960e-02).epsilon(1e-9));
    CHECK_THROWS_AS(fbm_normalization_squared(0.5), std::invalid_argument);
}

TEST_CASE("norm report emits one row per grid time") {
    const GridSpec grid = line_grid(65, 0.0625, -2.0, 3, 0.5);
    const Field f = indicator_field(grid);
    std::ostringstream os;
    norm_report_csv(replicated(f, 128), NormConfig{}, os);
    const std::string text = os.str();
    CHECK(text.rfind("t,z1,z2", 0) == 0);
    std::size_t lines = 0;
    for (char ch : text)
        if (ch == '\n') ++lines;
    CHECK(lines == 1 + grid.t_count);
}
