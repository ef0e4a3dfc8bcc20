#include "platesim/patchmap.hpp"

#include "platesim/errors.hpp"
#include "platesim/ini.hpp"
#include "platesim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace platesim {

void PotentialMap::validate() const {
    if (rows < 8 || cols < 8) {
        throw std::invalid_argument("potential map must be at least 8x8");
    }
    if (!(pitch > 0.0)) {
        throw std::invalid_argument("map pitch must be positive");
    }
    if (values.size() != static_cast<std::size_t>(rows) * cols) {
        throw std::invalid_argument("map value count does not match shape");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("map contains non-finite values");
        }
    }
}

double map_mean(const PotentialMap& map) {
    double sum = 0.0;
    for (double v : map.values) sum += v;
    return sum / static_cast<double>(map.values.size());
}

double map_std(const PotentialMap& map) {
    const double mean = map_mean(map);
    double var = 0.0;
    for (double v : map.values) var += (v - mean) * (v - mean);
    return std::sqrt(var / static_cast<double>(map.values.size()));
}

void SurfaceSpec::validate() const {
    if (!(sigma_L >= 0.0) || !(sigma_S >= 0.0)) {
        throw std::invalid_argument("surface rms voltages must be non-negative");
    }
    const double min_extent = std::min(extent_x, extent_y);
    if (!(corr_S > 0.0) || !(corr_S < corr_L) || !(corr_L < min_extent)) {
        throw std::invalid_argument(
            "surface scales require 0 < corr_S < corr_L < extent");
    }
    if (!(pitch > 0.0) || pitch > corr_S / 2.0) {
        throw std::invalid_argument(
            "pitch too coarse: must be <= corr_S/2 to resolve the short scale");
    }
}

namespace {

// One zero-mean Gaussian component on a grid with padding, realized by
// filtering white noise with a separable Gaussian kernel. The kernel width
// a = corr/sqrt(2) makes the field autocorrelation exp(-r^2/(2 corr^2)).
struct ComponentPlan {
    int rows, cols, pad;
    std::vector<double> kernel; // half kernel [0..pad]
    double scale;               // normalizes the output std to sigma
};

ComponentPlan plan_component(int rows, int cols, double pitch, double corr,
                             double sigma) {
    ComponentPlan plan;
    plan.rows = rows;
    plan.cols = cols;
    const double a = corr / std::sqrt(2.0);
    plan.pad = static_cast<int>(std::ceil(4.0 * a / pitch));
    plan.kernel.resize(plan.pad + 1);
    double sum_sq = plan.kernel[0] = 1.0;
    for (int j = 1; j <= plan.pad; ++j) {
        const double x = j * pitch;
        plan.kernel[j] = std::exp(-x * x / (2.0 * a * a));
        sum_sq += 2.0 * plan.kernel[j] * plan.kernel[j];
    }
    plan.scale = sigma / sum_sq; // 2-D variance gain of the separable filter
    return plan;
}

// Horizontal then vertical pass over the padded noise grid, writing the
// cropped result. Each output row/column is independent, so the OpenMP and
// serial paths produce identical bits.
template <bool Parallel>
void filter_component(const ComponentPlan& plan,
                      const std::vector<double>& noise,
                      std::vector<double>& out) {
    const int pad = plan.pad;
    const int prows = plan.rows + 2 * pad;
    const int pcols = plan.cols + 2 * pad;
    std::vector<double> horiz(static_cast<std::size_t>(prows) * plan.cols);

#pragma omp parallel for schedule(static) if (Parallel)
    for (int r = 0; r < prows; ++r) {
        const double* src = noise.data() + static_cast<std::size_t>(r) * pcols;
        double* dst = horiz.data() + static_cast<std::size_t>(r) * plan.cols;
        for (int c = 0; c < plan.cols; ++c) {
            const int center = c + pad;
            double acc = plan.kernel[0] * src[center];
            for (int j = 1; j <= pad; ++j) {
                acc += plan.kernel[j] * (src[center - j] + src[center + j]);
            }
            dst[c] = acc;
        }
    }

#pragma omp parallel for schedule(static) if (Parallel)
    for (int r = 0; r < plan.rows; ++r) {
        double* dst = out.data() + static_cast<std::size_t>(r) * plan.cols;
        for (int c = 0; c < plan.cols; ++c) {
            const int center = r + pad;
            double acc =
                plan.kernel[0] * horiz[static_cast<std::size_t>(center) * plan.cols + c];
            for (int j = 1; j <= pad; ++j) {
                acc += plan.kernel[j] *
                       (horiz[static_cast<std::size_t>(center - j) * plan.cols + c] +
                        horiz[static_cast<std::size_t>(center + j) * plan.cols + c]);
            }
            dst[c] += plan.scale * acc;
        }
    }
}

template <bool Parallel>
PotentialMap synthesize_impl(const SurfaceSpec& spec) {
    spec.validate();
    const int rows = static_cast<int>(std::round(spec.extent_y / spec.pitch));
    const int cols = static_cast<int>(std::round(spec.extent_x / spec.pitch));

    PotentialMap map;
    map.rows = rows;
    map.cols = cols;
    map.pitch = spec.pitch;
    map.values.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    map.validate();

    struct Component {
        double sigma, corr;
        const char* tag;
    };
    const Component comps[2] = {{spec.sigma_L, spec.corr_L, "surface-long"},
                                {spec.sigma_S, spec.corr_S, "surface-short"}};
    for (const auto& comp : comps) {
        if (comp.sigma == 0.0) continue;
        ComponentPlan plan =
            plan_component(rows, cols, spec.pitch, comp.corr, comp.sigma);
        const int prows = rows + 2 * plan.pad;
        const int pcols = cols + 2 * plan.pad;
        std::vector<double> noise(static_cast<std::size_t>(prows) * pcols);
        GaussianSampler gauss(derive_seed(spec.rng_seed, comp.tag));
        for (double& v : noise) v = gauss();
        filter_component<Parallel>(plan, noise, map.values);
    }

    const double mean = map_mean(map);
    for (double& v : map.values) v -= mean;
    return map;
}

// Fraction of the pitch^2 cell at offset (dr, dc) covered by a disc of
// radius R (in pitch units) centered at (0,0). Boundary cells are resolved
// by 16x16 midpoint subsampling.
double cell_coverage(int dr, int dc, double radius_cells) {
    const double r2 = radius_cells * radius_cells;
    const double ax = std::abs(static_cast<double>(dc));
    const double ay = std::abs(static_cast<double>(dr));
    const double nx = std::max(0.0, ax - 0.5);
    const double ny = std::max(0.0, ay - 0.5);
    const double nearest = nx * nx + ny * ny;
    const double fx = ax + 0.5;
    const double fy = ay + 0.5;
    const double farthest = fx * fx + fy * fy;
    if (farthest <= r2) return 1.0;
    if (nearest >= r2) return 0.0;
    int inside = 0;
    constexpr int kSub = 16;
    for (int i = 0; i < kSub; ++i) {
        const double y = dr - 0.5 + (i + 0.5) / kSub;
        for (int j = 0; j < kSub; ++j) {
            const double x = dc - 0.5 + (j + 0.5) / kSub;
            if (x * x + y * y <= r2) ++inside;
        }
    }
    return static_cast<double>(inside) / (kSub * kSub);
}

struct DiscKernel {
    int radius; // cells
    std::vector<double> weights; // (2r+1)^2, row-major

    double weight(int dr, int dc) const {
        return weights[static_cast<std::size_t>(dr + radius) * (2 * radius + 1) +
                       (dc + radius)];
    }
};

DiscKernel build_disc_kernel(double tip_diameter, double pitch) {
    DiscKernel k;
    const double radius_cells = 0.5 * tip_diameter / pitch;
    k.radius = static_cast<int>(std::ceil(radius_cells + 0.5));
    const int width = 2 * k.radius + 1;
    k.weights.assign(static_cast<std::size_t>(width) * width, 0.0);
    double total = 0.0;
    for (int dr = -k.radius; dr <= k.radius; ++dr) {
        for (int dc = -k.radius; dc <= k.radius; ++dc) {
            const double w = cell_coverage(dr, dc, radius_cells);
            k.weights[static_cast<std::size_t>(dr + k.radius) * width +
                      (dc + k.radius)] = w;
            total += w;
        }
    }
    // Normalize to unit sum; a delta kernel becomes exactly {1.0}, which
    // keeps tip_diameter == pitch a bit-exact identity.
    for (double& w : k.weights) w /= total;
    return k;
}

double disc_average_at(const PotentialMap& map, const DiscKernel& kernel,
                       int r, int c) {
    double acc = 0.0;
    double wsum = 0.0;
    const int r_lo = std::max(-kernel.radius, -r);
    const int r_hi = std::min(kernel.radius, map.rows - 1 - r);
    const int c_lo = std::max(-kernel.radius, -c);
    const int c_hi = std::min(kernel.radius, map.cols - 1 - c);
    for (int dr = r_lo; dr <= r_hi; ++dr) {
        for (int dc = c_lo; dc <= c_hi; ++dc) {
            const double w = kernel.weight(dr, dc);
            acc += w * map.at(r + dr, c + dc);
            wsum += w;
        }
    }
    return acc / wsum;
}

void check_tip(const PotentialMap& map, double tip_diameter) {
    if (!(tip_diameter >= map.pitch)) {
        throw std::invalid_argument("tip diameter must be at least one pitch");
    }
    if (tip_diameter > std::min(map.extent_x(), map.extent_y())) {
        throw std::domain_error("tip larger than the map extent");
    }
}

template <bool Parallel>
PotentialMap tip_convolve_impl(const PotentialMap& map, double tip_diameter) {
    map.validate();
    check_tip(map, tip_diameter);
    const DiscKernel kernel = build_disc_kernel(tip_diameter, map.pitch);
    PotentialMap out = map;

#pragma omp parallel for schedule(static) if (Parallel)
    for (int r = 0; r < map.rows; ++r) {
        for (int c = 0; c < map.cols; ++c) {
            out.at(r, c) = disc_average_at(map, kernel, r, c);
        }
    }
    return out;
}

} // namespace

PotentialMap synthesize_surface(const SurfaceSpec& spec) {
    return synthesize_impl<true>(spec);
}

PotentialMap synthesize_surface_serial(const SurfaceSpec& spec) {
    return synthesize_impl<false>(spec);
}

PotentialMap tip_convolve(const PotentialMap& map, double tip_diameter) {
    return tip_convolve_impl<true>(map, tip_diameter);
}

PotentialMap tip_convolve_serial(const PotentialMap& map, double tip_diameter) {
    return tip_convolve_impl<false>(map, tip_diameter);
}

MapStatistics map_statistics(const PotentialMap& map, double cutoff_lambda) {
    map.validate();
    const double max_cut = std::min(map.extent_x(), map.extent_y()) / 2.0;
    if (!(cutoff_lambda >= 2.0 * map.pitch) || !(cutoff_lambda <= max_cut)) {
        throw std::invalid_argument(
            "cutoff must lie in [2 pitch, extent/2]");
    }
    int half = static_cast<int>(std::round(cutoff_lambda / map.pitch / 2.0));
    half = std::max(1, half);

    // Box average via an integral image (edge-truncated window).
    const int rows = map.rows;
    const int cols = map.cols;
    std::vector<double> integral(static_cast<std::size_t>(rows + 1) * (cols + 1),
                                 0.0);
    for (int r = 0; r < rows; ++r) {
        double row_sum = 0.0;
        for (int c = 0; c < cols; ++c) {
            row_sum += map.at(r, c);
            integral[static_cast<std::size_t>(r + 1) * (cols + 1) + (c + 1)] =
                integral[static_cast<std::size_t>(r) * (cols + 1) + (c + 1)] +
                row_sum;
        }
    }
    auto box_sum = [&](int r0, int r1, int c0, int c1) {
        return integral[static_cast<std::size_t>(r1 + 1) * (cols + 1) + (c1 + 1)] -
               integral[static_cast<std::size_t>(r0) * (cols + 1) + (c1 + 1)] -
               integral[static_cast<std::size_t>(r1 + 1) * (cols + 1) + c0] +
               integral[static_cast<std::size_t>(r0) * (cols + 1) + c0];
    };

    double mean_sum = 0.0;
    double low_sq = 0.0, low_sum = 0.0, res_sq = 0.0, res_sum = 0.0;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int r0 = std::max(0, r - half);
            const int r1 = std::min(rows - 1, r + half);
            const int c0 = std::max(0, c - half);
            const int c1 = std::min(cols - 1, c + half);
            const double count = static_cast<double>((r1 - r0 + 1)) * (c1 - c0 + 1);
            const double low = box_sum(r0, r1, c0, c1) / count;
            const double res = map.at(r, c) - low;
            low_sum += low;
            low_sq += low * low;
            res_sum += res;
            res_sq += res * res;
            mean_sum += map.at(r, c);
        }
    }
    const double n = static_cast<double>(rows) * cols;
    MapStatistics stats;
    stats.mean = mean_sum / n;
    const double low_mean = low_sum / n;
    const double res_mean = res_sum / n;
    stats.sigma_L_est = std::sqrt(std::max(0.0, low_sq / n - low_mean * low_mean));
    stats.sigma_S_est = std::sqrt(std::max(0.0, res_sq / n - res_mean * res_mean));
    return stats;
}

PotentialMap kelvin_scan(const PotentialMap& map, double tip_diameter,
                         double step) {
    map.validate();
    check_tip(map, tip_diameter);
    if (!(step >= map.pitch)) {
        throw std::invalid_argument("scan step must be at least one pitch");
    }
    const int stride = std::max(1, static_cast<int>(std::round(step / map.pitch)));
    const DiscKernel kernel = build_disc_kernel(tip_diameter, map.pitch);

    PotentialMap out;
    out.rows = (map.rows - 1) / stride + 1;
    out.cols = (map.cols - 1) / stride + 1;
    out.pitch = stride * map.pitch;
    out.origin = map.origin;
    out.values.assign(static_cast<std::size_t>(out.rows) * out.cols, 0.0);

#pragma omp parallel for schedule(static)
    for (int r = 0; r < out.rows; ++r) {
        for (int c = 0; c < out.cols; ++c) {
            out.at(r, c) = disc_average_at(map, kernel, r * stride, c * stride);
        }
    }
    return out;
}

void write_map_csv(const std::filesystem::path& path, const PotentialMap& map) {
    map.validate();
    std::ofstream out(path);
    if (!out) throw config_error("cannot write file: " + path.string());
    out << "# pitch_m=" << format_double(map.pitch) << " n_rows=" << map.rows
        << " n_cols=" << map.cols << " origin_x_m=" << format_double(map.origin[0])
        << " origin_y_m=" << format_double(map.origin[1]) << "\n";
    for (int r = 0; r < map.rows; ++r) {
        for (int c = 0; c < map.cols; ++c) {
            if (c) out << ",";
            out << format_double(map.at(r, c));
        }
        out << "\n";
    }
}

PotentialMap read_map_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open file: " + path.string());
    PotentialMap map;
    std::string line;
    if (!std::getline(in, line) || line.empty() || line[0] != '#') {
        throw config_error(path.string() + ": missing map metadata header");
    }
    auto grab = [&](const std::string& key) {
        const auto pos = line.find(key + "=");
        if (pos == std::string::npos) {
            throw config_error(path.string() + ": header missing " + key);
        }
        const auto start = pos + key.size() + 1;
        auto end = line.find(' ', start);
        if (end == std::string::npos) end = line.size();
        return line.substr(start, end - start);
    };
    map.pitch = parse_double(grab("pitch_m"), path.string());
    map.rows = static_cast<int>(parse_integer(grab("n_rows"), path.string()));
    map.cols = static_cast<int>(parse_integer(grab("n_cols"), path.string()));
    map.origin[0] = parse_double(grab("origin_x_m"), path.string());
    map.origin[1] = parse_double(grab("origin_y_m"), path.string());
    map.values.reserve(static_cast<std::size_t>(map.rows) * map.cols);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t start = 0;
        while (start <= line.size()) {
            auto end = line.find(',', start);
            if (end == std::string::npos) end = line.size();
            map.values.push_back(
                parse_double(line.substr(start, end - start),
                             path.string() + ":" + std::to_string(lineno)));
            start = end + 1;
        }
    }
    map.validate();
    return map;
}

} // namespace platesim
