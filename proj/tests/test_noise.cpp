#include "doctest.h"

#include <stdexcept>

#include "rwave/noise.hpp"
#include "rwave/rng.hpp"

#include <cmath>
#include <sstream>
#include <vector>

using namespace rwave;

namespace {

GridSpec make_grid(std::size_t t_count, std::size_t x_count, double dt, double dx,
                   double t0 = 0.0, double x0 = 0.0) {
    GridSpec g;
    g.t_count = t_count;
    g.x_count = x_count;
    g.dt = dt;
    g.dx = dx;
    g.t0 = t0;
    g.x0 = x0;
    g.validate();
    return g;
}

} // namespace

TEST_CASE("fgn covariance matches reference values") {
    CHECK(fgn_covariance(0, 0.3, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fgn_covariance(1, 0.3, 1.0) == doctest::Approx(-2.42141716744801005e-01).epsilon(1e-14));
    CHECK(fgn_covariance(2, 0.3, 1.0) == doctest::Approx(-4.91255440445166336e-02).epsilon(1e-14));
    CHECK(fgn_covariance(4, 0.3, 1.0) == doctest::Approx(-1.75417853263049039e-02).epsilon(1e-14));
    CHECK(fgn_covariance(1, 0.25, 1.0) == doctest::Approx(-2.92893218813452427e-01).epsilon(1e-14));
    CHECK(fgn_covariance(0, 0.4, 0.125) == doctest::Approx(1.89464570813799749e-01).epsilon(1e-14));
    CHECK(fgn_covariance(3, 0.4, 0.125) == doctest::Approx(-4.16017882403385986e-03).epsilon(1e-14));
    // H = 1/2 is white noise: zero correlation at every nonzero lag.
    CHECK(fgn_covariance(1, 0.5, 1.0) == doctest::Approx(0.0));
    CHECK(fgn_covariance(5, 0.5, 1.0) == doctest::Approx(0.0));
    CHECK(fgn_covariance(-3, 0.3, 1.0) == doctest::Approx(fgn_covariance(3, 0.3, 1.0)));
}

TEST_CASE("fgn covariance block sums telescope to the span variance") {
    // Var of the sum of K consecutive increments is (K dx)^{2H}.
    for (double hurst : {0.3, 0.45}) {
        for (long K : {1L, 4L, 13L}) {
            double sum = 0.0;
            for (long j = 0; j < K; ++j)
                for (long k = 0; k < K; ++k) sum += fgn_covariance(j - k, hurst, 0.25);
            CHECK(sum == doctest::Approx(std::pow(K * 0.25, 2.0 * hurst)).epsilon(1e-12));
        }
    }
}

TEST_CASE("w covariance matches reference values") {
    CHECK(w_covariance_exact(2.0, 1.5, 1.0, -0.5, 0.3) ==
          doctest::Approx(2.09730944750919912e-01).epsilon(1e-14));
    CHECK(w_covariance_exact(1.0, 1.0, 1.0, 1.0, 0.3) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w_covariance_exact(1.0, 1.0, 1.0, 1.0, 0.45) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w_covariance_exact(3.0, 0.75, 2.0, 2.0, 0.35) ==
          doctest::Approx(1.27304800111120775).epsilon(1e-14));
    // Symmetry in the two points.
    CHECK(w_covariance_exact(2.0, 1.5, 1.0, -0.5, 0.3) ==
          doctest::Approx(w_covariance_exact(1.0, -0.5, 2.0, 1.5, 0.3)));
}

TEST_CASE("noise sampling is deterministic in the seed") {
    const GridSpec grid = make_grid(8, 64, 0.125, 0.0625);
    NoiseParams params;
    params.hurst = 0.35;
    params.seed = 77;
    const NoiseField a = sample_noise_field(grid, params);
    const NoiseField b = sample_noise_field(grid, params);
    REQUIRE(a.increments.size() == b.increments.size());
    for (std::size_t k = 0; k < a.increments.size(); ++k)
        CHECK(a.increments[k] == b.increments[k]);

    params.seed = 78;
    const NoiseField c = sample_noise_field(grid, params);
    std::size_t differing = 0;
    for (std::size_t k = 0; k < a.increments.size(); ++k)
        if (a.increments[k] != c.increments[k]) ++differing;
    CHECK(differing > a.increments.size() / 2);
}

TEST_CASE("sampled rows reproduce the stationary lag covariances") {
    // Many independent rows; pooled covariance at each lag within 4 SE.
    const std::size_t rows = 6000, cols = 256;
    const double dt = 0.01, dx = 0.125;
    const GridSpec grid = make_grid(rows, cols, dt, dx);
    for (double hurst : {0.3, 0.45}) {
        NoiseParams params;
        params.hurst = hurst;
        params.seed = 1000 + static_cast<std::uint64_t>(hurst * 100);
        const NoiseField field = sample_noise_field(grid, params);
        for (long lag : {0L, 1L, 2L, 4L, 8L}) {
            double mean = 0.0, m2 = 0.0;
            std::size_t count = 0;
            for (std::size_t i = 0; i < rows; ++i) {
                for (std::size_t j = 0; j + lag < cols; j += 16) {
                    const double prod = field.at(i, j) * field.at(i, j + lag);
                    ++count;
                    const double delta = prod - mean;
                    mean += delta / static_cast<double>(count);
                    m2 += delta * (prod - mean);
                }
            }
            const double se = std::sqrt(m2 / static_cast<double>(count - 1) /
                                        static_cast<double>(count));
            const double exact = dt * fgn_covariance(lag, hurst, dx);
            CHECK(std::abs(mean - exact) < 4.0 * se);
        }
    }
}

TEST_CASE("rows of the field are independent") {
    const std::size_t rows = 4000, cols = 32;
    const GridSpec grid = make_grid(rows, cols, 0.05, 0.25);
    NoiseParams params;
    params.hurst = 0.4;
    params.seed = 31;
    const NoiseField field = sample_noise_field(grid, params);
    double mean = 0.0, m2 = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i + 1 < rows; i += 2) {
        for (std::size_t j = 0; j < cols; j += 4) {
            const double prod = field.at(i, j) * field.at(i + 1, j);
            ++count;
            const double delta = prod - mean;
            mean += delta / static_cast<double>(count);
            m2 += delta * (prod - mean);
        }
    }
    const double se =
        std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count));
    CHECK(std::abs(mean) < 4.0 * se);
}

TEST_CASE("cholesky sampler agrees with the circulant one in law") {
    // Same covariance targets; compare pooled lag-1 covariance and entry
    // variance between the two samplers within combined 4 SE.
    const std::size_t rows = 3000, cols = 48;
    const GridSpec grid = make_grid(rows, cols, 0.02, 0.2);
    NoiseParams params;
    params.hurst = 0.3;
    params.seed = 555;
    const NoiseField fast = sample_noise_field(grid, params);
    const NoiseField slow = sample_noise_field_cholesky(grid, params);

    auto pooled = [&](const NoiseField& f, long lag) {
        double mean = 0.0, m2 = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < f.grid.t_count; ++i)
            for (std::size_t j = 0; j + lag < f.grid.x_count; j += 8) {
                const double prod = f.at(i, j) * f.at(i, j + lag);
                ++count;
                const double delta = prod - mean;
                mean += delta / static_cast<double>(count);
                m2 += delta * (prod - mean);
            }
        const double se = std::sqrt(m2 / static_cast<double>(count - 1) /
                                    static_cast<double>(count));
        return std::pair<double, double>(mean, se);
    };

    for (long lag : {0L, 1L, 3L}) {
        const auto [mf, sf] = pooled(fast, lag);
        const auto [ms, ss] = pooled(slow, lag);
        const double exact = grid.dt * fgn_covariance(lag, params.hurst, grid.dx);
        CHECK(std::abs(mf - exact) < 4.0 * sf);
        CHECK(std::abs(ms - exact) < 4.0 * ss);
    }
}

TEST_CASE("empirical field covariance matches the closed form") {
    const GridSpec grid = make_grid(8, 33, 0.25, 0.25, 0.0, -4.0);
    NoiseParams params;
    params.hurst = 0.35;
    std::vector<NoiseField> ensemble;
    ensemble.reserve(4000);
    for (std::size_t r = 0; r < 4000; ++r) {
        params.seed = derive_seed(2500, r);
        ensemble.push_back(sample_noise_field(grid, params));
    }
    struct Pair {
        double t, x, s, y;
    };
    for (const Pair& q : {Pair{1.0, 1.0, 1.0, 1.0}, Pair{2.0, 1.5, 1.0, -0.5},
                          Pair{1.5, -2.0, 0.75, 2.0}}) {
        const CovarianceEstimate est = empirical_w_covariance(ensemble, q.t, q.x, q.s, q.y);
        const double exact = w_covariance_exact(q.t, q.x, q.s, q.y, params.hurst);
        CHECK(std::abs(est.value - exact) < 4.0 * est.standard_error);
    }
}

TEST_CASE("mollifier kernel has unit mass and variance eps") {
    const GridSpec grid = make_grid(1, 257, 1.0, 0.03125);
    NoiseField spike{grid, NoiseParams{}, std::vector<double>(grid.size(), 0.0)};
    spike.at(0, 128) = 1.0;
    const double eps = 25.0 * grid.dx * grid.dx;
    const NoiseField smooth = mollify_field(spike, eps);

    double mass = 0.0, second = 0.0;
    for (std::size_t j = 0; j < grid.x_count; ++j) {
        const double w = smooth.at(0, j);
        const double offset = (static_cast<double>(j) - 128.0) * grid.dx;
        mass += w;
        second += w * offset * offset;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(second == doctest::Approx(eps).epsilon(1e-6));
}

TEST_CASE("mollifier composes like a semigroup on resolved scales") {
    const GridSpec grid = make_grid(1, 513, 1.0, 0.03125);
    NoiseField spike{grid, NoiseParams{}, std::vector<double>(grid.size(), 0.0)};
    spike.at(0, 256) = 1.0;
    const double e1 = 20.0 * grid.dx * grid.dx;
    const double e2 = 30.0 * grid.dx * grid.dx;
    const NoiseField twice = mollify_field(mollify_field(spike, e1), e2);
    const NoiseField once = mollify_field(spike, e1 + e2);
    double max_err = 0.0, peak = 0.0;
    for (std::size_t j = 0; j < grid.x_count; ++j) {
        max_err = std::max(max_err, std::abs(twice.at(0, j) - once.at(0, j)));
        peak = std::max(peak, once.at(0, j));
    }
    CHECK(max_err < 1e-3 * peak);
}

TEST_CASE("mollification contracts the entry variance") {
    const GridSpec grid = make_grid(64, 256, 0.05, 0.05);
    NoiseParams params;
    params.hurst = 0.3;
    params.seed = 9;
    const NoiseField raw = sample_noise_field(grid, params);
    const NoiseField smooth = mollify_field(raw, 4.0 * grid.dx * grid.dx);
    auto sq = [](const NoiseField& f) {
        double s = 0.0;
        for (double v : f.increments) s += v * v;
        return s;
    };
    CHECK(sq(smooth) < 0.8 * sq(raw));
}

TEST_CASE("mollifier radius covers eight standard deviations") {
    for (double eps : {1e-4, 4e-3, 0.25}) {
        for (double dx : {0.01, 0.125}) {
            const long r = mollifier_radius_cells(eps, dx);
            CHECK(r * dx >= 8.0 * std::sqrt(eps) - 1e-12);
            CHECK((r - 1) * dx < 8.0 * std::sqrt(eps));
        }
    }
}

TEST_CASE("unresolvable mollifier scales are rejected") {
    const GridSpec grid = make_grid(2, 16, 0.5, 0.5);
    NoiseField f{grid, NoiseParams{}, std::vector<double>(grid.size(), 0.0)};
    CHECK_THROWS_AS(mollify_field(f, 0.5 * 0.5 / 101.0), std::invalid_argument);
    CHECK_THROWS_AS(mollify_field(f, 0.0), std::domain_error);
}

TEST_CASE("binary serialization roundtrips bit-exactly") {
    const GridSpec grid = make_grid(5, 17, 0.2, 0.4, 0.0, -3.2);
    NoiseParams params;
    params.hurst = 0.41;
    params.seed = 4242;
    const NoiseField field = sample_noise_field(grid, params);

    std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
    save_noise_binary(field, buf);
    const NoiseField back = load_noise_binary(buf);

    CHECK(back.grid == field.grid);
    CHECK(back.params.hurst == field.params.hurst);
    CHECK(back.params.seed == field.params.seed);
    REQUIRE(back.increments.size() == field.increments.size());
    for (std::size_t k = 0; k < field.increments.size(); ++k)
        CHECK(back.increments[k] == field.increments[k]);
}

TEST_CASE("csv export carries the grid header and all rows") {
    const GridSpec grid = make_grid(3, 4, 0.5, 0.25);
    NoiseParams params;
    params.seed = 1;
    const NoiseField field = sample_noise_field(grid, params);
    std::ostringstream os;
    save_noise_csv(field, os);
    const std::string text = os.str();
    CHECK(text.rfind("# t_count", 0) == 0);
    std::size_t lines = 0;
    for (char ch : text)
        if (ch == '\n') ++lines;
    CHECK(lines == 2 + grid.t_count);
}

TEST_CASE("hurst outside the admissible range is rejected") {
    NoiseParams params;
    params.hurst = 0.6;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
    params.hurst = 0.0;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
    params.hurst = 0.5;
    CHECK_NOTHROW(params.validate());
}
