#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdo {

struct GeometryConfig {
    int n_per_surface = 200;   // panels per surface; stations = n_per_surface + 1
    int nx = 10;               // chordwise FFD control columns
    int ny = 2;                // vertical FFD control rows
    double margin_x = 0.0;     // zero margin pins LE/TE via Bernstein end conditions
    double margin_y = 0.05;
    int n_quad = 64;           // camber-line quadrature nodes
    double dy_max = 0.05;      // box bound on each FFD displacement (chord units)
    double alpha_min_deg = -5.0;
    double alpha_max_deg = 10.0;
};

// Surfaces sampled at shared x stations, leading edge first. The closed
// counterclockwise polyline runs TE -> upper surface -> LE -> lower surface.
struct AirfoilShape {
    std::vector<double> x;
    std::vector<double> yu;
    std::vector<double> yl;
    double area = 0.0;
    double perimeter = 0.0;

    // Closed loop without the repeated first point.
    std::vector<std::pair<double, double>> polyline() const;
};

struct FfdLattice {
    int nx = 0;
    int ny = 0;
    double x_min = 0.0, x_max = 0.0;
    double y_min = 0.0, y_max = 0.0;
    std::vector<int> locked_columns;  // first and last chordwise columns
};

struct DesignVector {
    std::vector<double> ffd_dy;  // one per free lattice node, column-major (col, row)
    double alpha_deg = 0.0;

    std::vector<double> flatten() const;
    static DesignVector from_flat(const std::vector<double>& v);
};

class DegenerateGeometryError : public std::runtime_error {
public:
    explicit DegenerateGeometryError(const std::string& what)
        : std::runtime_error(what) {}
};

double naca0012_half_thickness(double x);

// Precomputes the baseline profile, the FFD Bernstein weights, and every
// design-independent sensitivity. All methods are pure; instances are
// immutable after construction and safe to share across threads.
class GeometryContext {
public:
    explicit GeometryContext(const GeometryConfig& cfg = {});

    const GeometryConfig& config() const { return cfg_; }
    const AirfoilShape& baseline() const { return baseline_; }
    const FfdLattice& lattice() const { return lattice_; }
    double area0() const { return baseline_.area; }
    int n_free() const { return n_free_; }
    int n_dv() const { return n_free_ + 1; }  // displacements + alpha
    int n_stations() const { return static_cast<int>(baseline_.x.size()); }

    // Bernstein weight of free dof f at surface station p (sum over rows of
    // the lattice column weights); upper and lower surfaces separately.
    double weight_upper(int p, int f) const { return wu_[idx(p, f)]; }
    double weight_lower(int p, int f) const { return wl_[idx(p, f)]; }
    // Full tensor-product weights (all nx*ny nodes) for one surface point.
    std::vector<double> full_weights_upper(int p) const;

    AirfoilShape deform(const DesignVector& d) const;  // throws on self-intersection

    // Camber-line slopes dz_c/dx at the quadrature nodes x_q = (1-cos t_q)/2.
    std::vector<double> camber_slopes(const AirfoilShape& s) const;
    const std::vector<double>& quad_theta() const { return theta_q_; }

    struct Thickness {
        double t_over_c;
        int station;  // argmax surface station
    };
    Thickness max_thickness(const AirfoilShape& s) const;

    // Design-independent sensitivities (FFD is linear in the displacements).
    const std::vector<double>& area_grad() const { return area_grad_; }      // n_free
    // d(slope_q)/d(dy_f), row-major (q, f).
    const std::vector<double>& slope_grad() const { return slope_grad_; }

    // Shape-dependent sensitivities.
    std::vector<double> perimeter_grad(const AirfoilShape& s) const;   // n_free
    std::vector<double> thickness_grad(const AirfoilShape& s) const;   // n_free

    void clamp(std::vector<double>& theta) const;

private:
    std::size_t idx(int p, int f) const {
        return static_cast<std::size_t>(p) * static_cast<std::size_t>(n_free_) +
               static_cast<std::size_t>(f);
    }

    GeometryConfig cfg_;
    AirfoilShape baseline_;
    FfdLattice lattice_;
    int n_free_ = 0;
    std::vector<double> wu_, wl_;       // (stations, n_free) row-major
    std::vector<double> theta_q_;       // quadrature angles
    std::vector<int> seg_idx_;          // surface segment containing each x_q
    std::vector<double> seg_dx_;
    std::vector<double> area_grad_;
    std::vector<double> slope_grad_;    // (n_quad, n_free) row-major
};

double polyline_area(const std::vector<std::pair<double, double>>& poly);
double polyline_perimeter(const std::vector<std::pair<double, double>>& poly);

void write_shape_dat(const AirfoilShape& s, const std::string& path);

}  // namespace rdo
