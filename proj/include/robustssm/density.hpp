#ifndef ROBUSTSSM_DENSITY_HPP
#define ROBUSTSSM_DENSITY_HPP

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "robustssm/block_tridiag.hpp"
#include "robustssm/rho.hpp"
#include "robustssm/term.hpp"
#include "robustssm/types.hpp"

namespace rssm {

// Model contract (static polymorphism; dispatched through templates):
//
//   static constexpr int kMaxTermVars;   largest xvars count of any term
//   static constexpr int kParamDim;      p (0 allowed)
//   int q() const; int r() const; int T() const; int first_row() const;
//   const ThetaSpec& theta_spec() const;
//   const std::vector<std::string>& group_labels() const;
//   const std::vector<std::string>& state_labels() const;
//   const std::vector<std::string>& obs_labels() const;
//   int year_of_row(int t) const;
//   std::vector<Term> terms(const ObservationSeries& y) const;
//   std::string term_label(const Term&) const;
//   template <class TS, class XS>
//   XS term_value(const Term&, std::span<const TS> theta_nat,
//                 std::span<const XS> x, std::span<const double> y) const;
//
// f-terms may touch states in rows {t-1, t}, g-terms in row t only, h-terms
// in the first active row; xvars must respect that Markov structure.

template <class M>
int active_rows(const M& m) {
  return m.T() + 1 - m.first_row();
}

template <class M>
int active_dim(const M& m) {
  return active_rows(m) * m.q();
}

template <class M>
Eigen::VectorXd to_flat(const M& m, const StateSequence& x) {
  const int q = m.q(), t0 = m.first_row();
  Eigen::VectorXd out(active_dim(m));
  for (int t = t0; t <= m.T(); ++t)
    for (int c = 0; c < q; ++c) out[(t - t0) * q + c] = x.values(t, c);
  return out;
}

template <class M>
StateSequence from_flat(const M& m, const Eigen::VectorXd& flat) {
  const int q = m.q(), t0 = m.first_row();
  StateSequence x(m.T() + 1, q);
  x.labels = m.state_labels();
  for (int t = t0; t <= m.T(); ++t)
    for (int c = 0; c < q; ++c) x.values(t, c) = flat[(t - t0) * q + c];
  if (t0 > 0) x.values.row(0) = x.values.row(t0);  // padding row, not modeled
  return x;
}

namespace detail {

template <class M>
void gather_y(const M& m, const Term& term, const ObservationSeries& y,
              std::array<double, 16>& buf) {
  const int r = m.r();
  for (size_t i = 0; i < term.ycells.size(); ++i)
    buf[i] = y.values(term.ycells[i] / r, term.ycells[i] % r);
}

[[noreturn]] inline void throw_term_error(int year, TermType type,
                                          const std::string& group) {
  throw EvalError("non-finite log-density contribution at t=" +
                  std::to_string(year) + " type=" + to_string(type) +
                  " group=" + group);
}

}  // namespace detail

// check the declared Markov structure of a schedule
template <class M>
void validate_terms(const M& m, const std::vector<Term>& terms) {
  const int q = m.q();
  for (const Term& term : terms) {
    const int b = term.t - m.first_row();
    for (int32_t v : term.xvars) {
      const int bv = v / q;
      const bool ok = term.type == TermType::Transition
                          ? (bv == b || bv == b - 1)
                          : bv == b;
      if (!ok)
        throw StructureError("term at t=" + std::to_string(term.t) +
                             " touches a state outside its Markov window");
    }
  }
}

// sum of per-term contributions, each passed through its group's rho; with
// all-Identity rho this is the raw joint log-density of Eq. (1)
template <class M>
double robustified_joint(const M& m, std::span<const double> theta_nat,
                         const Eigen::VectorXd& xflat,
                         const ObservationSeries& y,
                         const std::vector<Term>& terms,
                         const std::vector<RhoFunction>& rho_by_group,
                         std::vector<double>* term_values = nullptr) {
  std::array<double, M::kMaxTermVars> xloc;
  std::array<double, 16> yloc;
  if (term_values) term_values->resize(terms.size());
  double acc = 0.0;
  for (size_t i = 0; i < terms.size(); ++i) {
    const Term& term = terms[i];
    for (size_t k = 0; k < term.xvars.size(); ++k) xloc[k] = xflat[term.xvars[k]];
    detail::gather_y(m, term, y, yloc);
    const double v = m.template term_value<double, double>(
        term, theta_nat, std::span<const double>(xloc.data(), term.xvars.size()),
        std::span<const double>(yloc.data(), term.ycells.size()));
    if (!std::isfinite(v))
      detail::throw_term_error(m.year_of_row(term.t), term.type,
                               m.group_labels()[term.group]);
    if (term_values) (*term_values)[i] = v;
    acc += rho_by_group[term.group](v);
  }
  if (!std::isfinite(acc)) throw EvalError("non-finite joint log-density");
  return acc;
}

// value, gradient and block-tridiagonal Hessian with respect to the states
template <class M>
double state_grad_hess(const M& m, std::span<const double> theta_nat,
                       const Eigen::VectorXd& xflat, const ObservationSeries& y,
                       const std::vector<Term>& terms,
                       const std::vector<RhoFunction>& rho_by_group,
                       Eigen::VectorXd& grad, BlockTridiagonal& hess) {
  using T2 = Taylor2<double, M::kMaxTermVars>;
  std::array<T2, M::kMaxTermVars> xloc;
  std::array<double, 16> yloc;
  grad.setZero(active_dim(m));
  hess.set_zero();
  double acc = 0.0;
  for (const Term& term : terms) {
    const int k = static_cast<int>(term.xvars.size());
    for (int i = 0; i < k; ++i) xloc[i] = T2::seed(xflat[term.xvars[i]], i, k);
    detail::gather_y(m, term, y, yloc);
    const T2 v = m.template term_value<double, T2>(
        term, theta_nat, std::span<const T2>(xloc.data(), k),
        std::span<const double>(yloc.data(), term.ycells.size()));
    if (!std::isfinite(v.val))
      detail::throw_term_error(m.year_of_row(term.t), term.type,
                               m.group_labels()[term.group]);
    const T2 r = rho_by_group[term.group](v);
    acc += r.val;
    for (int i = 0; i < k; ++i) {
      grad[term.xvars[i]] += r.g[i];
      for (int j = 0; j <= i; ++j)
        hess.add_sym(term.xvars[i], term.xvars[j], r.h[T2::hidx(i, j)]);
    }
  }
  return acc;
}

// per-term robustness weights rho'(term value), tagged for diagnostics
struct WeightRow {
  int year = 0;
  std::string label;
  TermType type = TermType::Transition;
  std::string group;
  double value = 0.0;
  double weight = 1.0;
};

template <class M>
std::vector<WeightRow> contribution_weights(
    const M& m, std::span<const double> theta_nat, const Eigen::VectorXd& xflat,
    const ObservationSeries& y, const std::vector<Term>& terms,
    const std::vector<RhoFunction>& rho_by_group) {
  std::vector<double> values;
  robustified_joint(m, theta_nat, xflat, y, terms, rho_by_group, &values);
  std::vector<WeightRow> out;
  out.reserve(terms.size());
  for (size_t i = 0; i < terms.size(); ++i) {
    const Term& term = terms[i];
    WeightRow row;
    row.year = m.year_of_row(term.t);
    row.label = m.term_label(term);
    row.type = term.type;
    row.group = m.group_labels()[term.group];
    row.value = values[i];
    row.weight = rho_by_group[term.group].weight(values[i]);
    out.push_back(std::move(row));
  }
  return out;
}

// third-order sweep: direct theta-gradient, cross second derivatives B and
// the trace contractions against the partial inverse of -H (see laplace.hpp)
template <class M>
struct ScoreSweepResult {
  Eigen::VectorXd direct;     // d logp / d theta at fixed x
  Eigen::MatrixXd cross;      // B(i,j) = d2 logp / dx_i dtheta_j
  Eigen::VectorXd trace_theta;  // tau_j = sum Ainv_ik d3/dx_i dx_k dtheta_j
  Eigen::VectorXd trace_x;      // g3_m  = sum Ainv_ik d3/dx_i dx_k dx_m
};

template <class M>
ScoreSweepResult<M> score_sweep(const M& m, const Eigen::VectorXd& theta_unc,
                                const Eigen::VectorXd& xflat,
                                const ObservationSeries& y,
                                const std::vector<Term>& terms,
                                const std::vector<RhoFunction>& rho_by_group,
                                const BlockTridiagonal& ainv) {
  static constexpr int kP = M::kParamDim > 0 ? M::kParamDim : 1;
  static constexpr int kTan = kP + M::kMaxTermVars;
  using TS = DualV<kTan>;
  using T2 = Taylor2<TS, M::kMaxTermVars>;

  const int p = static_cast<int>(theta_unc.size());
  const int n = active_dim(m);

  // natural-scale theta with tangents seeded on the unconstrained scale
  std::array<TS, kP> theta_nat;
  {
    std::array<TS, kP> u;
    for (int j = 0; j < p; ++j) u[j] = TS::seed(theta_unc[j], j, p);
    natural_from_unconstrained<TS, kP>(m.theta_spec(),
                                       std::span<const TS>(u.data(), p),
                                       theta_nat);
  }
  const std::span<const TS> theta_span(theta_nat.data(), p);

  ScoreSweepResult<M> out;
  out.direct = Eigen::VectorXd::Zero(p);
  out.cross = Eigen::MatrixXd::Zero(n, p);
  out.trace_theta = Eigen::VectorXd::Zero(p);
  out.trace_x = Eigen::VectorXd::Zero(n);

  std::array<T2, M::kMaxTermVars> xloc;
  std::array<double, 16> yloc;
  for (const Term& term : terms) {
    const int k = static_cast<int>(term.xvars.size());
    for (int i = 0; i < k; ++i)
      xloc[i] = T2::seed(TS::seed(xflat[term.xvars[i]], p + i, p + i + 1), i, k);
    detail::gather_y(m, term, y, yloc);
    const T2 v = m.template term_value<TS, T2>(
        term, theta_span, std::span<const T2>(xloc.data(), k),
        std::span<const double>(yloc.data(), term.ycells.size()));
    const T2 r = rho_by_group[term.group](v);

    for (int j = 0; j < p; ++j) out.direct[j] += r.val.deriv(j);
    for (int i = 0; i < k; ++i) {
      const TS& gi = r.g[i];
      for (int j = 0; j < p; ++j) out.cross(term.xvars[i], j) += gi.deriv(j);
    }
    for (int i = 0; i < k; ++i)
      for (int j2 = 0; j2 <= i; ++j2) {
        const double w = (i == j2) ? 1.0 : 2.0;
        const double aij = ainv.get(term.xvars[i], term.xvars[j2]);
        if (aij == 0.0) continue;
        const TS& hij = r.h[T2::hidx(i, j2)];
        const double waij = w * aij;
        for (int j = 0; j < p; ++j) out.trace_theta[j] += waij * hij.deriv(j);
        for (int mm = 0; mm < k; ++mm)
          out.trace_x[term.xvars[mm]] += waij * hij.deriv(p + mm);
      }
  }
  return out;
}

// evaluates natural-scale theta as plain doubles
template <class M>
Eigen::VectorXd natural_theta(const M& m, const Eigen::VectorXd& theta_unc) {
  Eigen::VectorXd out(theta_unc.size());
  for (int i = 0; i < theta_unc.size(); ++i)
    out[i] = m.theta_spec()[i].transform.to_natural(theta_unc[i]);
  return out;
}

}  // namespace rssm

#endif
