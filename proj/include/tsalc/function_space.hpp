#pragma once

// Controller space built from an initial control law.
//
// For an anchor x~ and a subset w of the state coordinates, (x, x~)_w takes
// x_i for i in w and x~_i otherwise. The basis function for subset w of
// output channel i is the inclusion-exclusion residual
//
//   g_w(x) = sum_{v subset of w} (-1)^{|w|-|v|} g0_i((x, x~)_v)
//
// so that g_w vanishes at x~ for every nonempty w and the 2^n basis functions
// of a channel sum back to g0_i. A controller is one simplex of weights per
// channel over the scaled basis functions Gamma * g_w.
//
// Subsets are bitmasks: bit i set means coordinate i (0-based) belongs to w.
// The basis column index of a subset is its mask value.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tsalc/common.hpp"

namespace tsalc {

using SubsetMask = std::uint32_t;

inline constexpr int kMaxStateDim = 12;

inline bool mask_contains(SubsetMask w, int i) { return ((w >> i) & 1U) != 0; }
inline int mask_size(SubsetMask w) { return __builtin_popcount(w); }
inline std::size_t subset_count(int n) { return std::size_t{1} << n; }

struct StateBox {
    Vector lower;
    Vector upper;

    StateBox() = default;
    StateBox(Vector lo, Vector hi);

    int dim() const { return static_cast<int>(lower.size()); }
    bool contains(const Vector& x, double tol = 0.0) const;
    double volume() const;
    double max_width() const;
    Vector center() const { return 0.5 * (lower + upper); }
};

/// (x, anchor)_w: coordinates in w from x, the rest from anchor.
Vector mask_vector(const Vector& x, const Vector& anchor, SubsetMask w);

/// Axis-aligned bounding box of the samples. In symmetric mode the box is
/// {x : |x|_inf <= max_k |sample_k|_inf}.
StateBox box_hull(const std::vector<Vector>& samples, bool symmetric = false);

/// True when the masked vector stays inside the box.
bool proposition1_check(const StateBox& box, const Vector& x, const Vector& anchor, SubsetMask w);

// ---------------------------------------------------------------------------

/// A known baseline control law R^n -> R^m.
class InitialLaw {
public:
    using Fn = std::function<Vector(const Vector&)>;

    InitialLaw() = default;
    InitialLaw(int n, int m, Fn fn, std::string name = "custom");

    int state_dim() const { return n_; }
    int input_dim() const { return m_; }
    const std::string& name() const { return name_; }

    Vector operator()(const Vector& x) const;

    /// u = offset - gain * (x - reference).
    static InitialLaw linear_feedback(const Matrix& gain, const Vector& reference, const Vector& offset);

    struct Term {
        double coef = 0.0;
        std::vector<int> powers;
    };
    /// One polynomial per output channel, each a list of monomials.
    static InitialLaw polynomial(int n, std::vector<std::vector<Term>> channels);

private:
    int n_ = 0;
    int m_ = 0;
    Fn fn_;
    std::string name_;
};

class BasisSet {
public:
    BasisSet(InitialLaw law, Vector anchor, double gamma, StateBox box);

    /// Gamma defaults to 2^n, which makes the uniform-weight controller equal the initial law.
    static double default_gamma(int n) { return static_cast<double>(subset_count(n)); }

    int state_dim() const { return law_.state_dim(); }
    int input_dim() const { return law_.input_dim(); }
    std::size_t basis_count() const { return subset_count(state_dim()); }
    double gamma() const { return gamma_; }
    const Vector& anchor() const { return anchor_; }
    const StateBox& box() const { return box_; }
    const InitialLaw& law() const { return law_; }

    /// Recursive form: g_w(x) = g0((x,x~)_w) - sum over proper subsets v of g_v(x),
    /// memoized over the subsets of w.
    double eval_recursive(int channel, SubsetMask w, const Vector& x) const;

    /// Alternating-sign closed form over the subsets of w.
    double eval_closed(int channel, SubsetMask w, const Vector& x) const;

    /// All basis values at x: an m x 2^n matrix, column = subset mask.
    /// One pass with 2^n evaluations of the initial law.
    Matrix eval_all(const Vector& x) const;

private:
    InitialLaw law_;
    Vector anchor_;
    double gamma_;
    StateBox box_;
};

/// m simplexes of dimension 2^n; row i holds the weights of channel i.
struct ControllerWeights {
    Matrix alpha;

    ControllerWeights() = default;
    explicit ControllerWeights(Matrix a) : alpha(std::move(a)) {}

    int channels() const { return static_cast<int>(alpha.rows()); }
    std::size_t basis_count() const { return static_cast<std::size_t>(alpha.cols()); }

    /// Throws InvalidInput unless every row is a probability vector (tolerance 1e-12).
    void validate() const;
    bool is_valid(double tol = 1e-12) const;

    static ControllerWeights uniform(int m, int n);
    /// Channel i puts all mass on subset `vertices[i]`.
    static ControllerWeights vertex(int n, const std::vector<SubsetMask>& vertices);

    /// Row-major flattening (used as coordinates of the controller).
    Vector flattened() const;

    bool operator==(const ControllerWeights& other) const { return alpha == other.alpha; }
};

/// u_i = sum_w alpha_i(w) * Gamma * g_w(x).
Vector controller_eval(const BasisSet& basis, const ControllerWeights& weights, const Vector& x);

/// Same as controller_eval but skips the simplex check (hot loop of rollouts).
Vector controller_eval_unchecked(const BasisSet& basis, const ControllerWeights& weights, const Vector& x);

}  // namespace tsalc
