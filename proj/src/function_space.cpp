#include "tsalc/function_space.hpp"

#include <cmath>

namespace tsalc {

StateBox::StateBox(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
    require(lower.size() == upper.size(), "StateBox: bound dimension mismatch");
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        require(std::isfinite(lower(i)) && std::isfinite(upper(i)), "StateBox: non-finite bound");
        require(lower(i) <= upper(i), "StateBox: lower bound exceeds upper bound");
    }
}

bool StateBox::contains(const Vector& x, double tol) const {
    if (x.size() != lower.size()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x(i) < lower(i) - tol || x(i) > upper(i) + tol) return false;
    }
    return true;
}

double StateBox::volume() const { return (upper - lower).prod(); }

double StateBox::max_width() const { return lower.size() == 0 ? 0.0 : (upper - lower).maxCoeff(); }

Vector mask_vector(const Vector& x, const Vector& anchor, SubsetMask w) {
    require(x.size() == anchor.size(), "mask_vector: state and anchor dimensions differ");
    require(x.size() <= kMaxStateDim, "mask_vector: state dimension exceeds 12");
    require(w < subset_count(static_cast<int>(x.size())), "mask_vector: subset mask out of range");
    Vector d = anchor;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (mask_contains(w, static_cast<int>(i))) d(i) = x(i);
    }
    return d;
}

StateBox box_hull(const std::vector<Vector>& samples, bool symmetric) {
    require(!samples.empty(), "box_hull: empty sample list");
    const auto n = samples.front().size();
    for (const auto& s : samples) require(s.size() == n, "box_hull: inconsistent sample dimensions");
    if (symmetric) {
        double r = 0.0;
        for (const auto& s : samples) r = std::max(r, s.size() ? s.cwiseAbs().maxCoeff() : 0.0);
        return {Vector::Constant(n, -r), Vector::Constant(n, r)};
    }
    Vector lo = samples.front();
    Vector hi = samples.front();
    for (const auto& s : samples) {
        lo = lo.cwiseMin(s);
        hi = hi.cwiseMax(s);
    }
    return {lo, hi};
}

bool proposition1_check(const StateBox& box, const Vector& x, const Vector& anchor, SubsetMask w) {
    return box.contains(mask_vector(x, anchor, w));
}

// ---------------------------------------------------------------------------

InitialLaw::InitialLaw(int n, int m, Fn fn, std::string name)
    : n_(n), m_(m), fn_(std::move(fn)), name_(std::move(name)) {
    require(n >= 1 && n <= kMaxStateDim, "InitialLaw: state dimension must be in [1, 12]");
    require(m >= 1, "InitialLaw: input dimension must be positive");
    require(static_cast<bool>(fn_), "InitialLaw: empty function");
}

Vector InitialLaw::operator()(const Vector& x) const {
    require(x.size() == n_, "InitialLaw: state dimension mismatch");
    Vector u = fn_(x);
    require(u.size() == m_, "InitialLaw: law returned wrong output dimension");
    return u;
}

InitialLaw InitialLaw::linear_feedback(const Matrix& gain, const Vector& reference, const Vector& offset) {
    const auto m = gain.rows();
    const auto n = gain.cols();
    require(reference.size() == n, "linear_feedback: reference must have length n");
    require(offset.size() == m, "linear_feedback: offset must have length m");
    return InitialLaw(static_cast<int>(n), static_cast<int>(m),
                      [gain, reference, offset](const Vector& x) -> Vector {
                          return offset - gain * (x - reference);
                      },
                      "linear_feedback");
}

InitialLaw InitialLaw::polynomial(int n, std::vector<std::vector<Term>> channels) {
    require(!channels.empty(), "polynomial law: no channels");
    for (const auto& ch : channels) {
        for (const auto& t : ch) {
            require(static_cast<int>(t.powers.size()) == n, "polynomial law: term power list must have length n");
            for (int p : t.powers) require(p >= 0, "polynomial law: negative power");
        }
    }
    const int m = static_cast<int>(channels.size());
    return InitialLaw(n, m,
                      [channels = std::move(channels)](const Vector& x) -> Vector {
                          Vector u = Vector::Zero(static_cast<Eigen::Index>(channels.size()));
                          for (std::size_t i = 0; i < channels.size(); ++i) {
                              for (const auto& t : channels[i]) {
                                  double v = t.coef;
                                  for (std::size_t j = 0; j < t.powers.size(); ++j) {
                                      if (t.powers[j] != 0) v *= std::pow(x(static_cast<Eigen::Index>(j)), t.powers[j]);
                                  }
                                  u(static_cast<Eigen::Index>(i)) += v;
                              }
                          }
                          return u;
                      },
                      "polynomial");
}

// ---------------------------------------------------------------------------

BasisSet::BasisSet(InitialLaw law, Vector anchor, double gamma, StateBox box)
    : law_(std::move(law)), anchor_(std::move(anchor)), gamma_(gamma), box_(std::move(box)) {
    require(law_.state_dim() >= 1, "BasisSet: initial law not set");
    require(anchor_.size() == law_.state_dim(), "BasisSet: anchor must have length n");
    require(box_.dim() == law_.state_dim(), "BasisSet: box dimension must equal n");
    require(std::isfinite(gamma_) && gamma_ > 0.0, "BasisSet: gamma must be positive");
    require(box_.contains(anchor_), "BasisSet: anchor must lie inside the state box");
}

double BasisSet::eval_recursive(int channel, SubsetMask w, const Vector& x) const {
    require(channel >= 0 && channel < input_dim(), "eval_recursive: channel out of range");
    require(x.size() == state_dim(), "eval_recursive: state dimension mismatch");
    require(w < basis_count(), "eval_recursive: subset mask out of range");
    // Memo indexed by submask of w. Submasks of w are visited in increasing
    // numeric order, so every proper submask is ready before its supersets.
    std::vector<double> memo(basis_count(), 0.0);
    SubsetMask sub = 0;
    while (true) {
        double v = law_(mask_vector(x, anchor_, sub))(channel);
        if (sub != 0) {
            // Proper submasks of `sub`.
            for (SubsetMask p = (sub - 1) & sub;; p = (p - 1) & sub) {
                v -= memo[p];
                if (p == 0) break;
            }
        }
        memo[sub] = v;
        if (sub == w) break;
        sub = (sub - w) & w;  // next submask of w in increasing order
    }
    return memo[w];
}

double BasisSet::eval_closed(int channel, SubsetMask w, const Vector& x) const {
    require(channel >= 0 && channel < input_dim(), "eval_closed: channel out of range");
    require(x.size() == state_dim(), "eval_closed: state dimension mismatch");
    require(w < basis_count(), "eval_closed: subset mask out of range");
    const int wsize = mask_size(w);
    double acc = 0.0;
    for (SubsetMask v = w;; v = (v - 1) & w) {
        const double sign = ((wsize - mask_size(v)) % 2 == 0) ? 1.0 : -1.0;
        acc += sign * law_(mask_vector(x, anchor_, v))(channel);
        if (v == 0) break;
    }
    return acc;
}

Matrix BasisSet::eval_all(const Vector& x) const {
    require(x.size() == state_dim(), "eval_all: state dimension mismatch");
    const auto count = basis_count();
    const int m = input_dim();
    Matrix out(m, static_cast<Eigen::Index>(count));
    for (SubsetMask w = 0; w < count; ++w) out.col(w) = law_(mask_vector(x, anchor_, w));
    for (SubsetMask w = 1; w < count; ++w) {
        for (SubsetMask p = (w - 1) & w;; p = (p - 1) & w) {
            out.col(w) -= out.col(p);
            if (p == 0) break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

bool ControllerWeights::is_valid(double tol) const {
    if (alpha.rows() < 1 || alpha.cols() < 1) return false;
    for (Eigen::Index i = 0; i < alpha.rows(); ++i) {
        for (Eigen::Index j = 0; j < alpha.cols(); ++j) {
            if (!std::isfinite(alpha(i, j)) || alpha(i, j) < 0.0) return false;
        }
        if (std::abs(alpha.row(i).sum() - 1.0) > tol) return false;
    }
    return true;
}

void ControllerWeights::validate() const {
    if (!is_valid()) throw InvalidInput("ControllerWeights: every row must be a probability simplex");
}

ControllerWeights ControllerWeights::uniform(int m, int n) {
    const auto count = static_cast<Eigen::Index>(subset_count(n));
    return ControllerWeights(Matrix::Constant(m, count, 1.0 / static_cast<double>(count)));
}

ControllerWeights ControllerWeights::vertex(int n, const std::vector<SubsetMask>& vertices) {
    const auto count = static_cast<Eigen::Index>(subset_count(n));
    Matrix a = Matrix::Zero(static_cast<Eigen::Index>(vertices.size()), count);
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        require(vertices[i] < subset_count(n), "ControllerWeights::vertex: mask out of range");
        a(static_cast<Eigen::Index>(i), vertices[i]) = 1.0;
    }
    return ControllerWeights(std::move(a));
}

Vector ControllerWeights::flattened() const {
    Vector v(alpha.size());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < alpha.rows(); ++i)
        for (Eigen::Index j = 0; j < alpha.cols(); ++j) v(k++) = alpha(i, j);
    return v;
}

Vector controller_eval_unchecked(const BasisSet& basis, const ControllerWeights& weights, const Vector& x) {
    const Matrix values = basis.eval_all(x);
    return basis.gamma() * (weights.alpha.cwiseProduct(values)).rowwise().sum();
}

Vector controller_eval(const BasisSet& basis, const ControllerWeights& weights, const Vector& x) {
    weights.validate();
    require(weights.channels() == basis.input_dim(), "controller_eval: weight rows must equal m");
    require(weights.basis_count() == basis.basis_count(), "controller_eval: weight columns must equal 2^n");
    return controller_eval_unchecked(basis, weights, x);
}

}  // namespace tsalc
