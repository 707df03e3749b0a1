#include "rwave/noise.hpp"

#include "rwave/fft.hpp"
#include "rwave/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace rwave {

namespace {

// Embedding eigenvalues for one spatial row; length is the FFT size.
std::vector<double> circulant_eigenvalues(std::size_t x_count, double hurst, double dx) {
    const std::size_t p = next_pow2(2 * x_count);
    std::vector<std::complex<double>> c(p);
    for (std::size_t k = 0; k <= p / 2; ++k)
        c[k] = fgn_covariance(static_cast<long>(k), hurst, dx);
    for (std::size_t k = 1; k < p / 2; ++k) c[p - k] = c[k];
    fft_pow2(c, false);

    std::vector<double> lambda(p);
    double max_l = 0.0, min_l = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
        lambda[k] = c[k].real();
        max_l = std::max(max_l, lambda[k]);
        min_l = std::min(min_l, lambda[k]);
    }
    if (min_l < -1e-10 * std::max(max_l, 1.0))
        return {}; // caller falls back to the exact sampler
    for (auto& l : lambda) l = std::max(l, 0.0);
    return lambda;
}

void fill_rows_circulant(NoiseField& field, const std::vector<double>& lambda) {
    const std::size_t p = lambda.size();
    const std::size_t n = field.grid.x_count;
    std::vector<double> sq(p);
    for (std::size_t k = 0; k < p; ++k) sq[k] = std::sqrt(lambda[k]);
    const double scale = std::sqrt(field.grid.dt / static_cast<double>(p));

    std::vector<std::complex<double>> w(p);
    for (std::size_t i = 0; i < field.grid.t_count; ++i) {
        RngStream rng(field.params.seed, i);
        w[0] = sq[0] * rng.next_normal();
        for (std::size_t k = 1; k < p / 2; ++k) {
            const double a = rng.next_normal();
            const double b = rng.next_normal();
            const double amp = sq[k] * 0.70710678118654752440084436210484903928;
            w[k] = std::complex<double>(amp * a, amp * b);
            w[p - k] = std::conj(w[k]);
        }
        w[p / 2] = sq[p / 2] * rng.next_normal();
        fft_pow2(w, false);
        for (std::size_t j = 0; j < n; ++j) field.at(i, j) = w[j].real() * scale;
    }
}

// Dense Cholesky of the Toeplitz row covariance. Exact but cubic; guarded by
// a size cap so a rejected embedding on a huge grid fails loudly instead of
// stalling.
std::vector<double> cholesky_factor(std::size_t n, double hurst, double dx) {
    if (n > 4096)
        throw std::runtime_error(
            "sample_noise_field: circulant embedding rejected (negative eigenvalue "
            "beyond tolerance 1e-10) and the grid is too wide for the exact "
            "Cholesky fallback (x_count > 4096)");
    std::vector<double> l(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = fgn_covariance(static_cast<long>(i) - static_cast<long>(j), hurst, dx);
            for (std::size_t k = 0; k < j; ++k) sum -= l[i * n + k] * l[j * n + k];
            if (i == j) {
                if (sum <= 0.0)
                    throw std::runtime_error(
                        "sample_noise_field: covariance matrix not positive definite");
                l[i * n + i] = std::sqrt(sum);
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    return l;
}

void fill_rows_cholesky(NoiseField& field, const std::vector<double>& l) {
    const std::size_t n = field.grid.x_count;
    const double scale = std::sqrt(field.grid.dt);
    std::vector<double> g(n);
    for (std::size_t i = 0; i < field.grid.t_count; ++i) {
        RngStream rng(field.params.seed, i);
        for (std::size_t j = 0; j < n; ++j) g[j] = rng.next_normal();
        for (std::size_t j = n; j-- > 0;) {
            double sum = 0.0;
            for (std::size_t k = 0; k <= j; ++k) sum += l[j * n + k] * g[k];
            field.at(i, j) = sum * scale;
        }
    }
}

std::size_t locate_index(double value, double origin, double step, const char* what) {
    const double raw = (value - origin) / step;
    const double snapped = std::round(raw);
    if (std::abs(raw - snapped) > 1e-6 || snapped < 0.0)
        throw std::invalid_argument(std::string("empirical_w_covariance: ") + what +
                                    " does not lie on the grid");
    return static_cast<std::size_t>(snapped);
}

} // namespace

double fgn_covariance(long lag, double hurst, double dx) {
    if (!(hurst > 0.0) || hurst > 1.0)
        throw std::invalid_argument("fgn_covariance: hurst must lie in (0, 1]");
    if (!(dx > 0.0)) throw std::invalid_argument("fgn_covariance: dx must be positive");
    const double k = std::abs(static_cast<double>(lag));
    const double two_h = 2.0 * hurst;
    const double second_diff =
        std::pow(k + 1.0, two_h) + std::pow(std::abs(k - 1.0), two_h) - 2.0 * std::pow(k, two_h);
    return 0.5 * std::pow(dx, two_h) * second_diff;
}

double w_covariance_exact(double t, double x, double s, double y, double hurst) {
    const double two_h = 2.0 * hurst;
    return 0.5 * std::min(s, t) *
           (std::pow(std::abs(x), two_h) + std::pow(std::abs(y), two_h) -
            std::pow(std::abs(x - y), two_h));
}

NoiseField sample_noise_field(const GridSpec& grid, const NoiseParams& params) {
    grid.validate();
    params.validate();
    NoiseField field{grid, params, std::vector<double>(grid.size())};
    const std::vector<double> lambda = circulant_eigenvalues(grid.x_count, params.hurst, grid.dx);
    if (!lambda.empty()) {
        fill_rows_circulant(field, lambda);
    } else {
        fill_rows_cholesky(field, cholesky_factor(grid.x_count, params.hurst, grid.dx));
    }
    return field;
}

NoiseField sample_noise_field_cholesky(const GridSpec& grid, const NoiseParams& params) {
    grid.validate();
    params.validate();
    NoiseField field{grid, params, std::vector<double>(grid.size())};
    fill_rows_cholesky(field, cholesky_factor(grid.x_count, params.hurst, grid.dx));
    return field;
}

long mollifier_radius_cells(double eps, double dx) {
    if (!(eps > 0.0)) throw std::domain_error("mollifier_radius_cells: eps must be positive");
    return static_cast<long>(std::ceil(8.0 * std::sqrt(eps) / dx));
}

NoiseField mollify_field(const NoiseField& field, double eps) {
    if (!(eps > 0.0)) throw std::domain_error("mollify_field: eps must be positive");
    const double dx = field.grid.dx;
    if (eps < dx * dx / 100.0)
        throw std::invalid_argument(
            "mollify_field: eps below dx^2/100 is unresolvable on this grid");

    const long radius = mollifier_radius_cells(eps, dx);
    std::vector<double> kernel(2 * radius + 1);
    double mass = 0.0;
    for (long m = -radius; m <= radius; ++m) {
        const double v = std::exp(-(m * dx) * (m * dx) / (2.0 * eps));
        kernel[m + radius] = v;
        mass += v;
    }
    for (auto& v : kernel) v /= mass;

    const auto n = static_cast<long>(field.grid.x_count);
    NoiseField out{field.grid, field.params, std::vector<double>(field.grid.size(), 0.0)};
    for (std::size_t i = 0; i < field.grid.t_count; ++i) {
        for (long j = 0; j < n; ++j) {
            double sum = 0.0;
            const long m_lo = std::max(-radius, j - (n - 1));
            const long m_hi = std::min(radius, j);
            for (long m = m_lo; m <= m_hi; ++m)
                sum += kernel[m + radius] * field.at(i, j - m);
            out.at(i, static_cast<std::size_t>(j)) = sum;
        }
    }
    return out;
}

CovarianceEstimate empirical_w_covariance(const std::vector<NoiseField>& ensemble,
                                          double t, double x, double s, double y) {
    if (ensemble.size() < 100)
        throw std::invalid_argument("empirical_w_covariance: ensemble size must be >= 100");
    const GridSpec& grid = ensemble.front().grid;
    for (const auto& f : ensemble)
        if (!(f.grid == grid))
            throw std::invalid_argument("empirical_w_covariance: mixed grids in ensemble");

    const std::size_t rows1 = locate_index(t, grid.t0, grid.dt, "t of point1");
    const std::size_t rows2 = locate_index(s, grid.t0, grid.dt, "t of point2");
    const std::size_t col1 = locate_index(x, grid.x0, grid.dx, "x of point1");
    const std::size_t col2 = locate_index(y, grid.x0, grid.dx, "x of point2");
    const std::size_t col0 = locate_index(0.0, grid.x0, grid.dx, "anchor x = 0");
    if (rows1 > grid.t_count || rows2 > grid.t_count || col1 > grid.x_count ||
        col2 > grid.x_count)
        throw std::invalid_argument("empirical_w_covariance: point outside the grid");

    // W(t_m, x_n) = sum over rows i < m of (partial row sum to n) - (to col0).
    auto w_value = [&](const NoiseField& f, std::size_t rows, std::size_t col) {
        double sum = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
            if (col > col0)
                for (std::size_t j = col0; j < col; ++j) sum += f.at(i, j);
            else
                for (std::size_t j = col; j < col0; ++j) sum -= f.at(i, j);
        }
        return sum;
    };

    double mean = 0.0, m2 = 0.0;
    std::size_t count = 0;
    for (const auto& f : ensemble) {
        const double prod = w_value(f, rows1, col1) * w_value(f, rows2, col2);
        ++count;
        const double delta = prod - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (prod - mean);
    }
    const double var = m2 / static_cast<double>(count - 1);
    return {mean, std::sqrt(var / static_cast<double>(count))};
}

void save_noise_csv(const NoiseField& field, std::ostream& os) {
    os << "# t_count,x_count,dt,dx,t0,x0,hurst,seed\n";
    os.precision(17);
    os << field.grid.t_count << ',' << field.grid.x_count << ',' << field.grid.dt << ','
       << field.grid.dx << ',' << field.grid.t0 << ',' << field.grid.x0 << ','
       << field.params.hurst << ',' << field.params.seed << '\n';
    for (std::size_t i = 0; i < field.grid.t_count; ++i) {
        for (std::size_t j = 0; j < field.grid.x_count; ++j) {
            if (j) os << ',';
            os << field.at(i, j);
        }
        os << '\n';
    }
}

namespace {
constexpr char kNoiseMagic[8] = {'r', 'w', 'n', 'o', 'i', 's', 'e', '1'};
}

void save_noise_binary(const NoiseField& field, std::ostream& os) {
    os.write(kNoiseMagic, sizeof(kNoiseMagic));
    const std::uint64_t tc = field.grid.t_count, xc = field.grid.x_count;
    const double header[4] = {field.grid.dt, field.grid.dx, field.grid.t0, field.grid.x0};
    os.write(reinterpret_cast<const char*>(&tc), sizeof(tc));
    os.write(reinterpret_cast<const char*>(&xc), sizeof(xc));
    os.write(reinterpret_cast<const char*>(header), sizeof(header));
    os.write(reinterpret_cast<const char*>(&field.params.hurst), sizeof(double));
    os.write(reinterpret_cast<const char*>(&field.params.seed), sizeof(std::uint64_t));
    os.write(reinterpret_cast<const char*>(field.increments.data()),
             static_cast<std::streamsize>(field.increments.size() * sizeof(double)));
    if (!os) throw std::runtime_error("save_noise_binary: write failed");
}

NoiseField load_noise_binary(std::istream& is) {
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || !std::equal(magic, magic + 8, kNoiseMagic))
        throw std::runtime_error("load_noise_binary: bad magic");
    std::uint64_t tc = 0, xc = 0;
    double header[4];
    NoiseField field;
    is.read(reinterpret_cast<char*>(&tc), sizeof(tc));
    is.read(reinterpret_cast<char*>(&xc), sizeof(xc));
    is.read(reinterpret_cast<char*>(header), sizeof(header));
    is.read(reinterpret_cast<char*>(&field.params.hurst), sizeof(double));
    is.read(reinterpret_cast<char*>(&field.params.seed), sizeof(std::uint64_t));
    field.grid = GridSpec{tc, xc, header[0], header[1], header[2], header[3]};
    field.grid.validate();
    field.increments.resize(field.grid.size());
    is.read(reinterpret_cast<char*>(field.increments.data()),
            static_cast<std::streamsize>(field.increments.size() * sizeof(double)));
    if (!is) throw std::runtime_error("load_noise_binary: truncated stream");
    return field;
}

} // namespace rwave
