#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "degel/operators.hpp"

namespace degel {

using ScalarField2D = std::function<double(double, double)>;

struct DomainShape {
    enum class Type { Disk, Rectangle, Mask };
    Type type = Type::Disk;
    double R = 1.0, cx = 0.0, cy = 0.0; // disk
    double ax = 1.0, by = 1.0;          // rectangle [0,ax] x [0,by]
    std::vector<std::string> mask_rows; // mask file rows of {0,1,2}

    static DomainShape disk(double R, double cx = 0.0, double cy = 0.0);
    static DomainShape rectangle(double a, double b);
    static DomainShape mask(std::vector<std::string> rows);
    static DomainShape mask_from_file(const std::string& path);
};

enum class NodeClass : std::uint8_t { Exterior = 0, Interior = 1, Boundary = 2 };

/// Masked uniform lattice with a wide directional stencil. The K directions
/// come in antipodal pairs, so K/2 distinct lines are stored; arms have
/// length W*h and off-lattice endpoints are interpolated bilinearly with
/// nonnegative weights (the node-independent corner pattern is shared by
/// every interior node).
struct GridDomain {
    double h = 0.0;
    int nx = 0, ny = 0;
    double x0 = 0.0, y0 = 0.0;
    int K = 16;
    int W = 1;

    std::vector<NodeClass> mask;
    std::vector<double> boundary_data; // per node; meaningful on boundary nodes
    std::vector<double> weight_a;      // per node; meaningful on interior nodes
    std::vector<int> interior;         // interior node ids
    std::vector<std::array<int, 2>> interior_rows; // contiguous runs {first node, count}

    struct Line {
        double ux = 1.0, uy = 0.0; // unit direction
        double arm2 = 0.0;         // (W h)^2
        // corner index offsets and bilinear weights of the two endpoints
        std::array<int, 4> off_f{}, off_b{};
        std::array<double, 4> w_f{}, w_b{};
        double center_weight = 0.0; // total endpoint weight landing on the center
        bool lattice = false;       // endpoints are exact lattice nodes
    };
    std::vector<Line> lines; // K/2 lines, angles m*pi/(K/2); line 0 = x axis

    // geometry summaries
    double nu = 1.0;        // sup weight_a
    double mu = 1.0;        // inf weight_a
    double diameter = 0.0;  // of the continuous shape when analytic
    double out_radius = 0.0;
    double in_radius = 0.0; // estimated from the lattice
    double cx = 0.0, cy = 0.0;
    int deepest_node = -1;  // interior node farthest from the boundary

    int id(int i, int j) const { return j * nx + i; }
    double x(int node) const { return x0 + (node % nx) * h; }
    double y(int node) const { return y0 + (node / nx) * h; }
    int n_lines() const { return static_cast<int>(lines.size()); }
    bool is_interior(int node) const { return mask[static_cast<size_t>(node)] == NodeClass::Interior; }
    bool is_boundary(int node) const { return mask[static_cast<size_t>(node)] == NodeClass::Boundary; }
};

/// Build the masked grid. boundary_fn supplies Dirichlet data on the discrete
/// boundary layer, weight_fn the reaction weight a(x) > 0 on the interior.
/// Throws input_error when the interior comes out empty.
GridDomain build_domain(const DomainShape& shape, double h, const ScalarField2D& boundary_fn,
                        const ScalarField2D& weight_fn, int K = 16, int W = 1);

struct FieldState {
    std::vector<double> u; // per node; boundary entries pinned to the data
    long iterations = 0;
    double residual_sup = 0.0;
    double sup_u = 0.0;
    double tau = 0.0;
    enum class Status { Converged, Running, Blowup, Stalled } status = Status::Running;
};

std::string status_name(FieldState::Status s);

/// H_h[u] at an interior node: centered axis differences for the gradient,
/// second differences along the stencil lines, family-specific assembly.
/// The directional second differences are monotone in every neighbor value;
/// the degenerate prefactors are quasi-linear (they depend on u too).
double scheme_residual(const OperatorSpec& op, const GridDomain& dom, const std::vector<double>& u, int node);

/// Same assembly with the prefactors, direction choices, and blend weights
/// frozen from coef_field while the differences are taken on field. This is
/// the linear monotone envelope behind the damped iteration: nondecreasing
/// in every neighbor value of field.
double scheme_residual_frozen(const OperatorSpec& op, const GridDomain& dom,
                              const std::vector<double>& coef_field, const std::vector<double>& field,
                              int node);

struct GridSolveOptions {
    double tol_abs = 1e-9;
    double M_cap = 0.0; // 0: default 1e4 * sup boundary data
    long max_iter = 1000000;
    double tau_factor = 1.0;
    const std::vector<double>* warm_start = nullptr;
    // interior warm-start values are multiplied by this; a scaled positive
    // solution is again a sub-solution by k-homogeneity
    double warm_scale = 1.0;
};

/// Damped explicit fixed-point iteration u <- u + tau (H_h[u] + lam a |u|^(k-1) u),
/// tau from the measured scheme diagonal. Runs until the residual drops below
/// tol_abs, the field tops M_cap (blow-up), or max_iter sweeps (stalled).
FieldState solve_grid_bvp(const OperatorSpec& op, const GridDomain& dom, double lam,
                          const GridSolveOptions& opts = {});

/// Monotone-scheme tolerance scale for the reaction problem at this lambda.
double default_grid_tol(const GridDomain& dom, const OperatorSpec& op, double lam, double rel = 1e-6);

struct ComparisonReport {
    double max_interior_gap = 0.0;
    double max_boundary_gap = 0.0;
    double tol = 0.0;
    bool passed = false;
};

/// max over interior of (u_sub - u_super) <= max over boundary + tolerance.
ComparisonReport comparison_check(const std::vector<double>& u_sub, const std::vector<double>& u_super,
                                  const GridDomain& dom, double tol);

void dump_field_csv(const GridDomain& dom, const std::vector<double>& u, const std::string& path);
std::vector<double> load_field_csv(const GridDomain& dom, const std::string& path);

} // namespace degel
