#include "rdo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "rdo/csv.hpp"

namespace rdo {

namespace {

// B_i^n(u) for i = 0..n.
std::vector<double> bernstein_row(int n, double u) {
    std::vector<double> b(static_cast<std::size_t>(n) + 1, 0.0);
    b[0] = 1.0;
    for (int j = 1; j <= n; ++j) {
        double saved = 0.0;
        for (int i = 0; i < j; ++i) {
            const double tmp = b[static_cast<std::size_t>(i)];
            b[static_cast<std::size_t>(i)] = saved + (1.0 - u) * tmp;
            saved = u * tmp;
        }
        b[static_cast<std::size_t>(j)] = saved;
    }
    return b;
}

}  // namespace

double naca0012_half_thickness(double x) {
    constexpr double t = 0.12;
    return 5.0 * t *
           (0.2969 * std::sqrt(x) - 0.1260 * x - 0.3516 * x * x +
            0.2843 * x * x * x - 0.1036 * x * x * x * x);
}

std::vector<std::pair<double, double>> AirfoilShape::polyline() const {
    const std::size_t n = x.size() - 1;  // panel count per surface
    std::vector<std::pair<double, double>> poly;
    poly.reserve(2 * n);
    for (std::size_t k = 0; k <= n; ++k) poly.emplace_back(x[n - k], yu[n - k]);
    for (std::size_t k = 1; k < n; ++k) poly.emplace_back(x[k], yl[k]);
    return poly;
}

double polyline_area(const std::vector<std::pair<double, double>>& poly) {
    const std::size_t np = poly.size();
    double a = 0.0;
    for (std::size_t k = 0; k < np; ++k) {
        const auto& p = poly[k];
        const auto& q = poly[(k + 1) % np];
        a += p.first * q.second - q.first * p.second;
    }
    return 0.5 * a;
}

double polyline_perimeter(const std::vector<std::pair<double, double>>& poly) {
    const std::size_t np = poly.size();
    double s = 0.0;
    for (std::size_t k = 0; k < np; ++k) {
        const auto& p = poly[k];
        const auto& q = poly[(k + 1) % np];
        s += std::hypot(q.first - p.first, q.second - p.second);
    }
    return s;
}

std::vector<double> DesignVector::flatten() const {
    std::vector<double> v = ffd_dy;
    v.push_back(alpha_deg);
    return v;
}

DesignVector DesignVector::from_flat(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("DesignVector: empty flat vector");
    DesignVector d;
    d.ffd_dy.assign(v.begin(), v.end() - 1);
    d.alpha_deg = v.back();
    return d;
}

GeometryContext::GeometryContext(const GeometryConfig& cfg) : cfg_(cfg) {
    if (cfg_.n_per_surface < 50)
        throw std::invalid_argument("GeometryContext: n_per_surface must be >= 50");
    if (cfg_.nx < 3 || cfg_.ny < 2)
        throw std::invalid_argument("GeometryContext: lattice needs nx >= 3, ny >= 2");
    if (cfg_.n_quad < 16)
        throw std::invalid_argument("GeometryContext: n_quad must be >= 16");

    const int n = cfg_.n_per_surface;
    baseline_.x.resize(static_cast<std::size_t>(n) + 1);
    baseline_.yu.resize(static_cast<std::size_t>(n) + 1);
    baseline_.yl.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        const double xi = 0.5 * (1.0 - std::cos(std::numbers::pi * i / n));
        baseline_.x[static_cast<std::size_t>(i)] = xi;
    }
    baseline_.x.front() = 0.0;
    baseline_.x.back() = 1.0;
    for (int i = 0; i <= n; ++i) {
        const double yt =
            (i == 0 || i == n) ? 0.0 : naca0012_half_thickness(baseline_.x[static_cast<std::size_t>(i)]);
        baseline_.yu[static_cast<std::size_t>(i)] = yt;
        baseline_.yl[static_cast<std::size_t>(i)] = -yt;
    }

    double ymin = 0.0, ymax = 0.0;
    for (int i = 0; i <= n; ++i) {
        ymin = std::min(ymin, baseline_.yl[static_cast<std::size_t>(i)]);
        ymax = std::max(ymax, baseline_.yu[static_cast<std::size_t>(i)]);
    }
    lattice_.nx = cfg_.nx;
    lattice_.ny = cfg_.ny;
    lattice_.x_min = 0.0 - cfg_.margin_x;
    lattice_.x_max = 1.0 + cfg_.margin_x;
    lattice_.y_min = ymin - cfg_.margin_y;
    lattice_.y_max = ymax + cfg_.margin_y;
    lattice_.locked_columns = {0, cfg_.nx - 1};
    for (int i = 0; i <= n; ++i) {
        const double xi = baseline_.x[static_cast<std::size_t>(i)];
        if (xi < lattice_.x_min || xi > lattice_.x_max ||
            baseline_.yu[static_cast<std::size_t>(i)] > lattice_.y_max ||
            baseline_.yl[static_cast<std::size_t>(i)] < lattice_.y_min)
            throw std::invalid_argument("GeometryContext: surface point outside FFD box");
    }

    // Tensor-product Bernstein weights of the free nodes, frozen at the
    // baseline embedding (the lattice parameterizes vertical displacement
    // only, so the map from displacements to surface motion is exactly
    // linear with these constant weights).
    n_free_ = (cfg_.nx - 2) * cfg_.ny;
    const std::size_t np = baseline_.x.size();
    wu_.assign(np * static_cast<std::size_t>(n_free_), 0.0);
    wl_.assign(np * static_cast<std::size_t>(n_free_), 0.0);
    const double yspan = lattice_.y_max - lattice_.y_min;
    const double xspan = lattice_.x_max - lattice_.x_min;
    for (std::size_t p = 0; p < np; ++p) {
        const double u = (baseline_.x[p] - lattice_.x_min) / xspan;
        const auto bu = bernstein_row(cfg_.nx - 1, u);
        for (int surf = 0; surf < 2; ++surf) {
            const double y = surf == 0 ? baseline_.yu[p] : baseline_.yl[p];
            const double v = (y - lattice_.y_min) / yspan;
            const auto bv = bernstein_row(cfg_.ny - 1, v);
            auto* w = surf == 0 ? wu_.data() : wl_.data();
            for (int col = 1; col < cfg_.nx - 1; ++col)
                for (int row = 0; row < cfg_.ny; ++row) {
                    const int f = (col - 1) * cfg_.ny + row;
                    w[idx(static_cast<int>(p), f)] =
                        bu[static_cast<std::size_t>(col)] * bv[static_cast<std::size_t>(row)];
                }
        }
    }

    const auto poly = baseline_.polyline();
    baseline_.area = polyline_area(poly);
    baseline_.perimeter = polyline_perimeter(poly);

    // Quadrature nodes and the surface segment holding each one.
    theta_q_.resize(static_cast<std::size_t>(cfg_.n_quad));
    seg_idx_.resize(static_cast<std::size_t>(cfg_.n_quad));
    seg_dx_.resize(static_cast<std::size_t>(cfg_.n_quad));
    for (int q = 0; q < cfg_.n_quad; ++q) {
        const double th = std::numbers::pi * (q + 0.5) / cfg_.n_quad;
        theta_q_[static_cast<std::size_t>(q)] = th;
        const double xq = 0.5 * (1.0 - std::cos(th));
        auto it = std::upper_bound(baseline_.x.begin(), baseline_.x.end(), xq);
        int i = static_cast<int>(it - baseline_.x.begin()) - 1;
        i = std::clamp(i, 0, n - 1);
        seg_idx_[static_cast<std::size_t>(q)] = i;
        seg_dx_[static_cast<std::size_t>(q)] =
            baseline_.x[static_cast<std::size_t>(i) + 1] - baseline_.x[static_cast<std::size_t>(i)];
    }

    // d(area)/d(dy_f): shoelace is linear in y, so contract the constant
    // polyline area-vertex gradient with the FFD weights. Polyline index k
    // maps to upper station n-k for k <= n, lower station k-n afterwards.
    area_grad_.assign(static_cast<std::size_t>(n_free_), 0.0);
    const std::size_t npoly = poly.size();
    for (std::size_t k = 0; k < npoly; ++k) {
        const double xprev = poly[(k + npoly - 1) % npoly].first;
        const double xnext = poly[(k + 1) % npoly].first;
        const double dady = 0.5 * (xprev - xnext);
        const bool upper = k <= static_cast<std::size_t>(n);
        const int p = upper ? n - static_cast<int>(k) : static_cast<int>(k) - n;
        const double* w = upper ? wu_.data() : wl_.data();
        for (int f = 0; f < n_free_; ++f)
            area_grad_[static_cast<std::size_t>(f)] += dady * w[idx(p, f)];
    }

    // d(slope_q)/d(dy_f) through the camber mean and the segment difference.
    slope_grad_.assign(static_cast<std::size_t>(cfg_.n_quad) * static_cast<std::size_t>(n_free_), 0.0);
    for (int q = 0; q < cfg_.n_quad; ++q) {
        const int i = seg_idx_[static_cast<std::size_t>(q)];
        const double inv = 1.0 / seg_dx_[static_cast<std::size_t>(q)];
        for (int f = 0; f < n_free_; ++f) {
            const double zi = 0.5 * (wu_[idx(i, f)] + wl_[idx(i, f)]);
            const double zi1 = 0.5 * (wu_[idx(i + 1, f)] + wl_[idx(i + 1, f)]);
            slope_grad_[static_cast<std::size_t>(q) * static_cast<std::size_t>(n_free_) +
                        static_cast<std::size_t>(f)] = (zi1 - zi) * inv;
        }
    }
}

std::vector<double> GeometryContext::full_weights_upper(int p) const {
    const double xspan = lattice_.x_max - lattice_.x_min;
    const double yspan = lattice_.y_max - lattice_.y_min;
    const double u = (baseline_.x[static_cast<std::size_t>(p)] - lattice_.x_min) / xspan;
    const double v = (baseline_.yu[static_cast<std::size_t>(p)] - lattice_.y_min) / yspan;
    const auto bu = bernstein_row(cfg_.nx - 1, u);
    const auto bv = bernstein_row(cfg_.ny - 1, v);
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(cfg_.nx) * static_cast<std::size_t>(cfg_.ny));
    for (int col = 0; col < cfg_.nx; ++col)
        for (int row = 0; row < cfg_.ny; ++row)
            w.push_back(bu[static_cast<std::size_t>(col)] * bv[static_cast<std::size_t>(row)]);
    return w;
}

AirfoilShape GeometryContext::deform(const DesignVector& d) const {
    if (static_cast<int>(d.ffd_dy.size()) != n_free_)
        throw std::invalid_argument("deform: wrong number of displacements");
    for (double v : d.ffd_dy)
        if (!std::isfinite(v)) throw std::invalid_argument("deform: non-finite displacement");
    if (!std::isfinite(d.alpha_deg)) throw std::invalid_argument("deform: non-finite alpha");

    AirfoilShape s = baseline_;
    const std::size_t np = s.x.size();
    for (std::size_t p = 0; p < np; ++p) {
        double du = 0.0, dl = 0.0;
        const std::size_t base = p * static_cast<std::size_t>(n_free_);
        for (int f = 0; f < n_free_; ++f) {
            du += wu_[base + static_cast<std::size_t>(f)] * d.ffd_dy[static_cast<std::size_t>(f)];
            dl += wl_[base + static_cast<std::size_t>(f)] * d.ffd_dy[static_cast<std::size_t>(f)];
        }
        s.yu[p] += du;
        s.yl[p] += dl;
    }
    for (std::size_t p = 1; p + 1 < np; ++p)
        if (s.yu[p] - s.yl[p] <= 0.0)
            throw DegenerateGeometryError("deform: upper surface crosses lower surface");

    const auto poly = s.polyline();
    s.area = polyline_area(poly);
    s.perimeter = polyline_perimeter(poly);
    return s;
}

std::vector<double> GeometryContext::camber_slopes(const AirfoilShape& s) const {
    std::vector<double> out(static_cast<std::size_t>(cfg_.n_quad));
    for (int q = 0; q < cfg_.n_quad; ++q) {
        const std::size_t i = static_cast<std::size_t>(seg_idx_[static_cast<std::size_t>(q)]);
        const double zi = 0.5 * (s.yu[i] + s.yl[i]);
        const double zi1 = 0.5 * (s.yu[i + 1] + s.yl[i + 1]);
        out[static_cast<std::size_t>(q)] = (zi1 - zi) / seg_dx_[static_cast<std::size_t>(q)];
    }
    return out;
}

GeometryContext::Thickness GeometryContext::max_thickness(const AirfoilShape& s) const {
    double best = -1.0;
    int arg = 0;
    for (std::size_t p = 0; p < s.x.size(); ++p) {
        const double t = s.yu[p] - s.yl[p];
        if (t > best) {
            best = t;
            arg = static_cast<int>(p);
        }
    }
    return Thickness{best, arg};
}

std::vector<double> GeometryContext::perimeter_grad(const AirfoilShape& s) const {
    const auto poly = s.polyline();
    const std::size_t npoly = poly.size();
    std::vector<double> seg(npoly);
    for (std::size_t k = 0; k < npoly; ++k) {
        const auto& p = poly[k];
        const auto& q = poly[(k + 1) % npoly];
        seg[k] = std::hypot(q.first - p.first, q.second - p.second);
    }
    std::vector<double> out(static_cast<std::size_t>(n_free_), 0.0);
    const int n = cfg_.n_per_surface;
    for (std::size_t k = 0; k < npoly; ++k) {
        const double yk = poly[k].second;
        const double yprev = poly[(k + npoly - 1) % npoly].second;
        const double ynext = poly[(k + 1) % npoly].second;
        const double g = (yk - yprev) / seg[(k + npoly - 1) % npoly] + (yk - ynext) / seg[k];
        const bool upper = k <= static_cast<std::size_t>(n);
        const int p = upper ? n - static_cast<int>(k) : static_cast<int>(k) - n;
        const double* w = upper ? wu_.data() : wl_.data();
        for (int f = 0; f < n_free_; ++f)
            out[static_cast<std::size_t>(f)] += g * w[idx(p, f)];
    }
    return out;
}

std::vector<double> GeometryContext::thickness_grad(const AirfoilShape& s) const {
    const int p = max_thickness(s).station;
    std::vector<double> out(static_cast<std::size_t>(n_free_));
    for (int f = 0; f < n_free_; ++f)
        out[static_cast<std::size_t>(f)] = wu_[idx(p, f)] - wl_[idx(p, f)];
    return out;
}

void GeometryContext::clamp(std::vector<double>& theta) const {
    if (static_cast<int>(theta.size()) != n_dv())
        throw std::invalid_argument("clamp: wrong design length");
    for (int f = 0; f < n_free_; ++f)
        theta[static_cast<std::size_t>(f)] =
            std::clamp(theta[static_cast<std::size_t>(f)], -cfg_.dy_max, cfg_.dy_max);
    theta.back() = std::clamp(theta.back(), cfg_.alpha_min_deg, cfg_.alpha_max_deg);
}

void write_shape_dat(const AirfoilShape& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_shape_dat: cannot open " + path);
    auto poly = s.polyline();
    poly.push_back(poly.front());  // close the loop explicitly
    for (const auto& [x, y] : poly)
        out << format_g17(x) << ' ' << format_g17(y) << '\n';
}

}  // namespace rdo
