#include "doctest.h"

#include <stdexcept>

#include "rwave/chaos.hpp"
#include "rwave/noise.hpp"
#include "rwave/solver.hpp"
#include "rwave/special.hpp"

#include <cmath>
#include <complex>
#include <vector>

using namespace rwave;

namespace {

ChaosConfig config_at(double hurst, double t, double x, double xi_cutoff = 16777216.0) {
    ChaosConfig c;
    c.hurst = hurst;
    c.t = t;
    c.x = x;
    c.xi_cutoff = xi_cutoff;
    return c;
}

// Squared windowed transform of the first-chaos kernel at frequency xi,
// assembled from the public pieces: the window is the light cone at (t, x)
// and the data transform splits into shifted Gaussian windows.
double squared_window(double t, double x, double s, double xi) {
    const double a = x - (t - s);
    const double b = x + (t - s);
    const std::complex<double> f =
        0.25 * (gaussian_window_fourier(a, b, -s, xi) + gaussian_window_fourier(a, b, s, xi));
    return std::norm(f);
}

} // namespace

TEST_CASE("first-chaos kernel evaluates the cone-windowed data") {
    CHECK(g1_kernel_eval(0.0, 0.0, 1.0, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
    const double want = 0.25 * (std::exp(-2.25) + std::exp(-0.25));
    CHECK(g1_kernel_eval(1.0, 0.5, 2.0, 0.0) == doctest::Approx(want).epsilon(1e-14));
    // On and outside the cone boundary the kernel vanishes.
    CHECK(g1_kernel_eval(1.0, 1.75, 2.0, 0.5) == 0.0);
    CHECK(g1_kernel_eval(1.0, 1.5, 2.0, 0.5) == 0.0);
    CHECK_THROWS_AS(g1_kernel_eval(1.0, 0.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(g1_kernel_eval(-0.1, 0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("spectral density constant matches the covariance normalization") {
    // Gamma(2H+1) sin(pi H) / (2 pi), the density that makes the spectral
    // second moment of 1_{[0,1]} equal one.
    CHECK(spectral_density_constant(0.3) == doctest::Approx(0.11504819084081605).epsilon(1e-14));
    CHECK(spectral_density_constant(0.4) == doctest::Approx(0.14097922649999519).epsilon(1e-14));
    CHECK(spectral_density_constant(0.5) == doctest::Approx(0.15915494309189534).epsilon(1e-14));
    CHECK_THROWS_AS(spectral_density_constant(0.0), std::invalid_argument);
    CHECK_THROWS_AS(spectral_density_constant(0.51), std::invalid_argument);
}

TEST_CASE("squared window transform matches reference values") {
    CHECK(squared_window(2.0, 0.3, 0.6, 3.7) ==
          doctest::Approx(7.589493711005361e-03).epsilon(1e-10));
    CHECK(squared_window(2.0, 0.3, 1.5, 0.3) ==
          doctest::Approx(6.699917002103490e-03).epsilon(1e-10));
    CHECK(squared_window(2.0, 0.3, 0.25, 41.0) ==
          doctest::Approx(2.871274291646563e-06).epsilon(1e-10));
}

TEST_CASE("first-chaos second moment matches reference values") {
    // References carry the spectral integral up to the cutoff 2^24; at that
    // cutoff the remainder sits far below the quoted tolerance.
    CHECK(i1_second_moment(config_at(0.35, 1.0, 0.25)).value ==
          doctest::Approx(1.255097158708e-01).epsilon(2e-4));
    CHECK(i1_second_moment(config_at(0.3, 2.0, 0.0)).value ==
          doctest::Approx(1.637618303875e-01).epsilon(2e-4));
    CHECK(i1_second_moment(config_at(0.45, 2.0, 0.0)).value ==
          doctest::Approx(2.295452669124e-01).epsilon(2e-4));
    CHECK(i1_second_moment(config_at(0.4, 0.5, -1.0)).value ==
          doctest::Approx(1.267710703665e-02).epsilon(2e-4));
}

TEST_CASE("first-chaos second moment is symmetric and monotone") {
    const double plus = i1_second_moment(config_at(0.4, 1.0, 0.7, 65536.0)).value;
    const double minus = i1_second_moment(config_at(0.4, 1.0, -0.7, 65536.0)).value;
    CHECK(plus == doctest::Approx(minus).epsilon(1e-12));

    // Longer windows only add nonnegative mass.
    const double t1 = i1_second_moment(config_at(0.35, 0.5, 0.0, 65536.0)).value;
    const double t2 = i1_second_moment(config_at(0.35, 1.0, 0.0, 65536.0)).value;
    const double t3 = i1_second_moment(config_at(0.35, 2.0, 0.0, 65536.0)).value;
    CHECK(t1 < t2);
    CHECK(t2 < t3);

    // Monotone nondecreasing in the cutoff.
    const double xi1 = i1_second_moment(config_at(0.35, 1.0, 0.0, 16384.0)).value;
    const double xi2 = i1_second_moment(config_at(0.35, 1.0, 0.0, 65536.0)).value;
    const double xi3 = i1_second_moment(config_at(0.35, 1.0, 0.0, 1048576.0)).value;
    CHECK(xi1 <= xi2 + 1e-12);
    CHECK(xi2 <= xi3 + 1e-12);

    // The truncation estimate is honest metadata: positive and small at a
    // generous cutoff.
    const ChaosEstimate est = i1_second_moment(config_at(0.35, 1.0, 0.0, 65536.0));
    CHECK(est.truncation_error >= 0.0);
    CHECK(est.truncation_error < 1e-2 * est.value);
    CHECK(est.xi_cutoff == doctest::Approx(65536.0));
}

TEST_CASE("zero data gives a zero chaos estimate") {
    const ChaosEstimate est = i1_second_moment(config_at(0.4, 1.0, 0.0), ChaosData::Zero);
    CHECK(est.value == 0.0);
    const ChaosEstimate inc =
        dh_i1_second_moment(config_at(0.4, 2.0, 0.0), 0.25, ChaosData::Zero);
    CHECK(inc.value == 0.0);
}

TEST_CASE("increment second moment matches reference values") {
    const ChaosConfig h35 = config_at(0.35, 2.0, 0.0);
    CHECK(dh_i1_second_moment(h35, 0.0625).value ==
          doctest::Approx(1.246373921289e-02).epsilon(2e-3));
    CHECK(dh_i1_second_moment(h35, 0.015625).value ==
          doctest::Approx(4.526040116813e-03).epsilon(2e-3));
    CHECK(dh_i1_second_moment(h35, 0.00390625).value ==
          doctest::Approx(1.702628253822e-03).epsilon(2e-3));

    const ChaosConfig h30 = config_at(0.3, 2.0, 0.0);
    CHECK(dh_i1_second_moment(h30, 0.03125).value ==
          doctest::Approx(1.045900512979e-02).epsilon(2e-3));
    CHECK(dh_i1_second_moment(h30, 0.0078125).value ==
          doctest::Approx(4.495481789774e-03).epsilon(2e-3));

    const ChaosConfig h45 = config_at(0.45, 2.0, 0.0);
    CHECK(dh_i1_second_moment(h45, 0.03125).value ==
          doctest::Approx(3.805802361171e-03).epsilon(2e-3));
    CHECK(dh_i1_second_moment(h45, 0.0078125).value ==
          doctest::Approx(1.056580168242e-03).epsilon(2e-3));
}

TEST_CASE("increment second moment obeys its structural bounds") {
    const ChaosConfig c = config_at(0.4, 2.0, 0.0, 65536.0);
    CHECK(dh_i1_second_moment(c, 0.0).value == 0.0);

    // 2 - 2 cos is at most 4, so the increment moment is at most 4 times
    // the base moment.
    const double base = i1_second_moment(c).value;
    const double inc = dh_i1_second_moment(c, 0.3).value;
    CHECK(inc <= 4.0 * base * (1.0 + 1e-9));

    // Small-lag scaling: halving h shrinks the moment by about 2^{2H}.
    const ChaosConfig fine = config_at(0.35, 2.0, 0.0);
    const double d1 = dh_i1_second_moment(fine, 0.0078125).value;
    const double d2 = dh_i1_second_moment(fine, 0.00390625).value;
    CHECK(d1 / d2 == doctest::Approx(std::pow(2.0, 0.7)).epsilon(0.1));

    CHECK_THROWS_AS(dh_i1_second_moment(c, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(dh_i1_second_moment(c, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(dh_i1_second_moment(config_at(0.4, 1.5, 0.0), 0.8),
                    std::invalid_argument);
}

TEST_CASE("upper term of the second-chaos bound matches the closed form") {
    CHECK(i2_upper_term(config_at(0.26, 2.0, 0.0)) ==
          doctest::Approx(3.260441103349465).epsilon(1e-8));
    CHECK(i2_upper_term(config_at(0.3, 2.0, 0.0)) ==
          doctest::Approx(3.132719988910339).epsilon(1e-8));
    CHECK(i2_upper_term(config_at(0.35, 2.0, 0.0)) ==
          doctest::Approx(2.992190249620948).epsilon(1e-8));
    CHECK(i2_upper_term(config_at(0.4, 2.0, 0.0)) ==
          doctest::Approx(2.869500340283849).epsilon(1e-8));
    CHECK(i2_upper_term(config_at(0.5, 2.0, 0.0)) ==
          doctest::Approx(8.0 / 3.0).epsilon(1e-8));
    // The H -> 0 limit is 14/3: the term stays bounded while the scan side
    // diverges, which is the point of the comparison.
    CHECK(i2_upper_term(config_at(1e-4, 2.0, 0.0)) ==
          doctest::Approx(14.0 / 3.0).epsilon(1e-3));
    CHECK_THROWS_AS(i2_upper_term(config_at(0.4, 1.0, 0.0)), std::invalid_argument);
}

TEST_CASE("divergence scan enforces its domain") {
    ChaosConfig c = config_at(0.3, 2.0, 0.0, 65536.0);
    c.xi_nodes = 256;
    CHECK_THROWS_AS(i2_divergence_scan(config_at(0.3, 1.0, 0.0), {0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(i2_divergence_scan(c, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(i2_divergence_scan(c, {0.25, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(i2_divergence_scan(c, {1.5}), std::invalid_argument);
    CHECK_THROWS_AS(i2_divergence_scan(c, {0.5, 0.0}), std::invalid_argument);
}

TEST_CASE("divergence scan grows as the inner cutoff shrinks") {
    ChaosConfig c = config_at(0.3, 2.0, 0.0, 65536.0);
    c.xi_nodes = 256;
    const auto rows = i2_divergence_scan(c, {0.5, 0.25, 0.125});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].first == doctest::Approx(0.5));
    CHECK(rows[2].first == doctest::Approx(0.125));
    CHECK(rows[0].second > 0.0);
    CHECK(rows[1].second > rows[0].second);
    CHECK(rows[2].second > rows[1].second);
}

TEST_CASE("scan profile blend stays within its diagnostic band") {
    ChaosConfig c = config_at(0.3, 2.0, 0.0, 65536.0);
    c.xi_nodes = 256;
    CHECK(i2_profile_blend_mismatch(c) < 0.25);
}

TEST_CASE("log-log slope recovers exact power laws") {
    std::vector<std::pair<double, double>> rows;
    for (double h : {0.5, 0.25, 0.125, 0.0625}) rows.emplace_back(h, 3.0 * std::pow(h, 0.8));
    CHECK(log_log_slope(rows) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK_THROWS_AS(log_log_slope({{1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(log_log_slope({{1.0, 1.0}, {0.5, -2.0}}), std::invalid_argument);
}

TEST_CASE("chaos config validation rejects out-of-range fields") {
    ChaosConfig c;
    c.hurst = 0.6;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ChaosConfig{};
    c.t = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ChaosConfig{};
    c.xi_cutoff = -1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ChaosConfig{};
    c.xi_nodes = 16;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = ChaosConfig{};
    c.h_cutoff_inner = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    CHECK_NOTHROW(ChaosConfig{}.validate());
}

TEST_CASE("spectral moment agrees with the lattice covariance form") {
    // The exact variance of the left-point cone sum of the deterministic
    // part is a double sum against the stationary lag covariance; on a fine
    // lattice it approaches the spectral value.
    const double hurst = 0.4, dx = 0.015625;
    GridSpec grid;
    grid.t_count = 65;
    grid.x_count = 161;
    grid.dt = dx;
    grid.dx = dx;
    grid.t0 = 0.0;
    grid.x0 = -1.25;
    const std::size_t t_index = 64, x_index = 80; // the node (t, x) = (1, 0)

    std::vector<double> v(grid.t_count * grid.x_count);
    for (std::size_t i = 0; i < grid.t_count; ++i)
        for (std::size_t j = 0; j < grid.x_count; ++j)
            v[i * grid.x_count + j] =
                dalembert_I0(InitialData::gaussian(), grid.t(i), grid.x(j));

    double qf = 0.0;
    for (std::size_t i = 0; i < t_index; ++i) {
        const long m = static_cast<long>(t_index - i) - 1;
        const long lo = static_cast<long>(x_index) - m, hi = static_cast<long>(x_index) + m;
        for (long j = lo; j <= hi; ++j)
            for (long k = lo; k <= hi; ++k)
                qf += v[i * grid.x_count + static_cast<std::size_t>(j)] *
                      v[i * grid.x_count + static_cast<std::size_t>(k)] *
                      fgn_covariance(j - k, hurst, dx);
    }
    qf *= 0.25 * grid.dt;

    const double spectral = i1_second_moment(config_at(hurst, 1.0, 0.0, 65536.0)).value;
    CHECK(qf == doctest::Approx(spectral).epsilon(3e-2));
}
