#include "saew/accelerator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <spdlog/spdlog.h>

namespace saew {

DenseVector truncate_top(ConstVectorView v, std::size_t d0) {
  if (d0 > v.size()) throw InvalidInput("truncate_top: d0 exceeds the dimension");
  DenseVector out(v.size(), 0.0);
  if (d0 == 0) return out;
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(d0), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double ma = std::abs(v[a]);
                      const double mb = std::abs(v[b]);
                      return ma > mb || (ma == mb && a < b);
                    });
  for (std::size_t k = 0; k < d0; ++k) out[idx[k]] = v[idx[k]];
  return out;
}

Accelerator::Accelerator(ProblemParams params, std::size_t d, SubroutineFactory factory)
    : params_(params),
      d_(d),
      factory_(std::move(factory)),
      schedule_(params.delta, RegretCertificate{}) {
  if (d < 1) throw InvalidInput("Accelerator: dimension must be >= 1");
  params_.validate(d);
  if (params_.d0 < 1) throw InvalidInput("Accelerator: d0 must be >= 1 (use the null predictor for d0 = 0)");
  open_session(DenseVector(d, 0.0));
  schedule_ = ConfidenceSchedule(params_.delta, sub_->certificate());
  eps_ = params_.U;
  eps_prev_ = params_.U;
  eps_min_ = params_.U;
  eps_argmin_ = 0;
  theta_tilde_.assign(d, 0.0);
}

Accelerator::Accelerator(const Accelerator& other)
    : params_(other.params_),
      d_(other.d_),
      factory_(other.factory_),
      schedule_(other.schedule_),
      sub_(other.sub_->clone()),
      session_(other.session_),
      session_start_(other.session_start_),
      t_(other.t_),
      grad_sq_sum_(other.grad_sq_sum_),
      session_max_grad_(other.session_max_grad_),
      max_grad_sup_(other.max_grad_sup_),
      a_last_(other.a_last_),
      b_last_(other.b_last_),
      eps_(other.eps_),
      eps_prev_(other.eps_prev_),
      eps_min_(other.eps_min_),
      eps_argmin_(other.eps_argmin_),
      theta_bar_(other.theta_bar_),
      pred_sum_(other.pred_sum_),
      pred_sum_c_(other.pred_sum_c_),
      theta_tilde_(other.theta_tilde_),
      history_(other.history_) {}

Accelerator& Accelerator::operator=(const Accelerator& other) {
  if (this != &other) {
    Accelerator copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void Accelerator::open_session(DenseVector center) {
  const double radius = params_.U * std::exp2(-0.5 * session_);
  sub_ = factory_(L1Ball(std::move(center), radius), params_.B);
  grad_sq_sum_ = 0.0;
  session_max_grad_ = 0.0;
  theta_bar_.assign(d_, 0.0);
  pred_sum_.assign(d_, 0.0);
  pred_sum_c_.assign(d_, 0.0);
}

StepInfo Accelerator::step(const GradientOracle& oracle) {
  const DenseVector gradient = oracle(sub_->predict());
  return observe(gradient);
}

StepInfo Accelerator::observe(ConstVectorView gradient) {
  require_same_dimension(gradient, sub_->ball().center, "Accelerator::observe");
  require_finite(gradient, "Accelerator::observe gradient");

  const DenseVector& prediction = sub_->predict();
  const std::int64_t window = t_ - session_start_ + 1;

  // Running session average; the compensated sum resets drift periodically.
  const double inv = 1.0 / static_cast<double>(window);
  for (std::size_t j = 0; j < d_; ++j) {
    const double y = prediction[j] - pred_sum_c_[j];
    const double s = pred_sum_[j] + y;
    pred_sum_c_[j] = (s - pred_sum_[j]) - y;
    pred_sum_[j] = s;
    theta_bar_[j] += (prediction[j] - theta_bar_[j]) * inv;
  }
  if (window % kRecomputeEvery == 0) {
    for (std::size_t j = 0; j < d_; ++j) theta_bar_[j] = pred_sum_[j] * inv;
  }

  sub_->update(gradient);

  StepInfo info;
  info.t = t_;
  info.session = session_;
  info.window = window;
  info.grad_sup = linf_norm(gradient);
  grad_sq_sum_ += info.grad_sup * info.grad_sup;
  session_max_grad_ = std::max(session_max_grad_, info.grad_sup);
  max_grad_sup_ = std::max(max_grad_sup_, info.grad_sup);
  info.grad_sq_sum = grad_sq_sum_;
  info.a_prime = schedule_.session_a(session_, window);
  info.b_prime = schedule_.session_b(session_, window);
  info.err = err_bound(grad_sq_sum_, info.a_prime, info.b_prime, params_.B);
  info.epsilon = radius_bound(params_.d0, params_.U, session_, params_.alpha, window, info.err);
  a_last_ = info.a_prime;
  b_last_ = info.b_prime;

  eps_prev_ = eps_;
  eps_ = info.epsilon;
  if (eps_ < eps_min_) {
    eps_min_ = eps_;
    eps_argmin_ = t_;
    theta_tilde_ = theta_bar_;
  }

  ++t_;
  const auto before = history_.size();
  close_sessions();
  info.sessions_closed = static_cast<int>(history_.size() - before);
  return info;
}

void Accelerator::close_sessions() {
  // Literal form of "while eps_{t-1} > U 2^{-(i+1)/2}": keep closing while the
  // latest radius already clears the next threshold.
  while (eps_ <= params_.U * std::exp2(-0.5 * (session_ + 1))) {
    SessionRecord rec;
    rec.index = session_;
    rec.start = session_start_;
    rec.end = t_;
    rec.radius = sub_->ball().radius;
    rec.center = sub_->ball().center;
    rec.average = rec.length() == 0 ? rec.center : theta_bar_;
    rec.max_grad_sup = session_max_grad_;
    rec.epsilon_end = eps_;
    const bool empty = rec.length() == 0;
    rec.a_prime_end = empty ? 0.0 : a_last_;
    rec.b_prime_end = empty ? 0.0 : b_last_;
    rec.epsilon_before_end = rec.length() >= 2 ? eps_prev_ : 0.0;

    // An empty session made no predictions, so the next one reuses its center.
    DenseVector center = empty ? sub_->ball().center : truncate_top(theta_bar_, params_.d0);
    history_.push_back(std::move(rec));

    ++session_;
    session_start_ = t_;
    open_session(std::move(center));
  }
}

Estimators Accelerator::estimators() const { return {sub_->predict(), theta_tilde_}; }

nlohmann::json Accelerator::snapshot() const {
  nlohmann::json sessions = nlohmann::json::array();
  for (const auto& s : history_) {
    sessions.push_back({{"index", s.index},
                        {"start", s.start},
                        {"end", s.end},
                        {"radius", s.radius},
                        {"center", s.center},
                        {"average", s.average},
                        {"a_prime_end", s.a_prime_end},
                        {"b_prime_end", s.b_prime_end},
                        {"max_grad_sup", s.max_grad_sup},
                        {"epsilon_end", s.epsilon_end},
                        {"epsilon_before_end", s.epsilon_before_end}});
  }
  return {{"version", kSnapshotVersion},
          {"params",
           {{"d0", params_.d0}, {"alpha", params_.alpha}, {"U", params_.U}, {"B", params_.B}, {"delta", params_.delta}}},
          {"dimension", d_},
          {"session", session_},
          {"session_start", session_start_},
          {"t", t_},
          {"grad_sq_sum", grad_sq_sum_},
          {"session_max_grad", session_max_grad_},
          {"max_grad_sup", max_grad_sup_},
          {"a_last", a_last_},
          {"b_last", b_last_},
          {"epsilon", eps_},
          {"epsilon_prev", eps_prev_},
          {"epsilon_min", eps_min_},
          {"epsilon_argmin", eps_argmin_},
          {"theta_bar", theta_bar_},
          {"pred_sum", pred_sum_},
          {"pred_sum_compensation", pred_sum_c_},
          {"theta_tilde", theta_tilde_},
          {"subroutine", sub_->to_json()},
          {"sessions", sessions}};
}

Accelerator Accelerator::restore(const nlohmann::json& doc, SubroutineFactory factory) {
  if (doc.at("version").get<int>() != kSnapshotVersion) throw InvalidInput("Accelerator: unsupported snapshot version");
  const auto& p = doc.at("params");
  ProblemParams params{p.at("d0").get<std::size_t>(), p.at("alpha").get<double>(), p.at("U").get<double>(),
                       p.at("B").get<double>(), p.at("delta").get<double>()};
  Accelerator acc(params, doc.at("dimension").get<std::size_t>(), std::move(factory));
  acc.sub_ = subroutine_from_json(doc.at("subroutine"));
  acc.session_ = doc.at("session").get<int>();
  acc.session_start_ = doc.at("session_start").get<std::int64_t>();
  acc.t_ = doc.at("t").get<std::int64_t>();
  acc.grad_sq_sum_ = doc.at("grad_sq_sum").get<double>();
  acc.session_max_grad_ = doc.at("session_max_grad").get<double>();
  acc.max_grad_sup_ = doc.at("max_grad_sup").get<double>();
  acc.a_last_ = doc.at("a_last").get<double>();
  acc.b_last_ = doc.at("b_last").get<double>();
  acc.eps_ = doc.at("epsilon").get<double>();
  acc.eps_prev_ = doc.at("epsilon_prev").get<double>();
  acc.eps_min_ = doc.at("epsilon_min").get<double>();
  acc.eps_argmin_ = doc.at("epsilon_argmin").get<std::int64_t>();
  acc.theta_bar_ = doc.at("theta_bar").get<DenseVector>();
  acc.pred_sum_ = doc.at("pred_sum").get<DenseVector>();
  acc.pred_sum_c_ = doc.at("pred_sum_compensation").get<DenseVector>();
  acc.theta_tilde_ = doc.at("theta_tilde").get<DenseVector>();
  for (const auto& s : doc.at("sessions")) {
    SessionRecord r;
    r.index = s.at("index").get<int>();
    r.start = s.at("start").get<std::int64_t>();
    r.end = s.at("end").get<std::int64_t>();
    r.radius = s.at("radius").get<double>();
    r.center = s.at("center").get<DenseVector>();
    r.average = s.at("average").get<DenseVector>();
    r.a_prime_end = s.at("a_prime_end").get<double>();
    r.b_prime_end = s.at("b_prime_end").get<double>();
    r.max_grad_sup = s.at("max_grad_sup").get<double>();
    r.epsilon_end = s.at("epsilon_end").get<double>();
    r.epsilon_before_end = s.at("epsilon_before_end").get<double>();
    acc.history_.push_back(std::move(r));
  }
  return acc;
}

}  // namespace saew
