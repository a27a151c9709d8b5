#include "csimit/table.hpp"

#include <algorithm>
#include <cmath>

#include "csimit/errors.hpp"

namespace csimit {

namespace {

class Kahan {
 public:
  void add(double x) {
    double y = x - comp_;
    double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

JointTable JointTable::zeros(std::vector<Var> scope) {
  JointTable t;
  t.scope_ = std::move(scope);
  std::size_t n = 1;
  for (const auto& v : t.scope_) {
    if (v.domain.size() < 1) throw InputError("empty domain in table scope");
    n *= v.domain.size();
  }
  t.strides_.assign(t.scope_.size(), 1);
  for (int i = static_cast<int>(t.scope_.size()) - 2; i >= 0; --i) {
    t.strides_[i] = t.strides_[i + 1] * t.scope_[i + 1].domain.size();
  }
  t.probs_.assign(n, 0.0);
  return t;
}

int JointTable::var_position(const std::string& name) const {
  for (std::size_t i = 0; i < scope_.size(); ++i) {
    if (scope_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int JointTable::value_index(const std::string& var,
                            const std::string& value) const {
  int pos = var_position(var);
  if (pos < 0) throw InputError("variable '" + var + "' not in table scope");
  const auto& dom = scope_[pos].domain;
  auto it = std::find(dom.begin(), dom.end(), value);
  if (it == dom.end()) {
    throw InputError("value '" + value + "' not in the domain of '" + var +
                     "'");
  }
  return static_cast<int>(it - dom.begin());
}

std::size_t JointTable::flat_index(const std::vector<int>& digits) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < scope_.size(); ++i) {
    idx += static_cast<std::size_t>(digits[i]) * strides_[i];
  }
  return idx;
}

std::vector<int> JointTable::digits(std::size_t flat) const {
  std::vector<int> out(scope_.size());
  for (std::size_t i = 0; i < scope_.size(); ++i) {
    out[i] = static_cast<int>((flat / strides_[i]) % scope_[i].domain.size());
  }
  return out;
}

int JointTable::digit(std::size_t flat, int var_pos) const {
  return static_cast<int>((flat / strides_[var_pos]) %
                          scope_[var_pos].domain.size());
}

PartialAssignment JointTable::assignment_at(std::size_t flat) const {
  PartialAssignment a;
  for (std::size_t i = 0; i < scope_.size(); ++i) {
    a.bind(scope_[i].name, scope_[i].domain[digit(flat, static_cast<int>(i))]);
  }
  return a;
}

bool JointTable::consistent(std::size_t flat, const PartialAssignment& a) const {
  for (const auto& [var, value] : a.bindings()) {
    int pos = var_position(var);
    if (pos < 0) continue;
    if (scope_[pos].domain[digit(flat, pos)] != value) return false;
  }
  return true;
}

double JointTable::total() const {
  Kahan acc;
  for (double p : probs_) acc.add(p);
  return acc.value();
}

double JointTable::mass(const PartialAssignment& a) const {
  for (const auto& [var, value] : a.bindings()) {
    value_index(var, value);  // validates var and value
  }
  Kahan acc;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (consistent(i, a)) acc.add(probs_[i]);
  }
  return acc.value();
}

JointTable JointTable::marginal(const std::vector<std::string>& vars) const {
  std::vector<Var> kept;
  std::vector<int> positions;
  for (const auto& v : scope_) {
    if (std::find(vars.begin(), vars.end(), v.name) != vars.end()) {
      positions.push_back(var_position(v.name));
      kept.push_back(v);
    }
  }
  if (kept.size() != vars.size()) {
    throw InputError("marginal: some variables are not in the table scope");
  }
  JointTable out = zeros(std::move(kept));
  std::vector<Kahan> acc(out.size());
  std::vector<int> sub(positions.size());
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    for (std::size_t k = 0; k < positions.size(); ++k) {
      sub[k] = digit(i, positions[k]);
    }
    acc[out.flat_index(sub)].add(probs_[i]);
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = acc[i].value();
  out.estimated_n_ = estimated_n_;
  return out;
}

JointTable JointTable::condition(const PartialAssignment& on) const {
  double z = mass(on);
  if (z <= 0.0) {
    throw ZeroMassContext("conditioning on zero-probability event {" +
                          on.to_key() + "}");
  }
  std::vector<Var> kept;
  std::vector<int> positions;
  for (const auto& v : scope_) {
    if (!on.binds(v.name)) {
      positions.push_back(var_position(v.name));
      kept.push_back(v);
    }
  }
  JointTable out = zeros(std::move(kept));
  std::vector<Kahan> acc(out.size());
  std::vector<int> sub(positions.size());
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (!consistent(i, on)) continue;
    for (std::size_t k = 0; k < positions.size(); ++k) {
      sub[k] = digit(i, positions[k]);
    }
    acc[out.flat_index(sub)].add(probs_[i]);
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = acc[i].value() / z;
  out.estimated_n_ = estimated_n_;
  return out;
}

std::vector<double> JointTable::distribution_of(
    const std::string& var, const PartialAssignment& given) const {
  int pos = var_position(var);
  if (pos < 0) throw InputError("variable '" + var + "' not in table scope");
  double z = mass(given);
  if (z <= 0.0) {
    throw ZeroMassContext("conditioning on zero-probability event {" +
                          given.to_key() + "}");
  }
  std::vector<Kahan> acc(scope_[pos].domain.size());
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (consistent(i, given)) acc[digit(i, pos)].add(probs_[i]);
  }
  std::vector<double> out(acc.size());
  for (std::size_t k = 0; k < acc.size(); ++k) out[k] = acc[k].value() / z;
  return out;
}

void JointTable::normalize() {
  double z = total();
  if (z <= 0.0) throw ZeroMassContext("normalizing an all-zero table");
  for (auto& p : probs_) p /= z;
}

double kl_divergence(const JointTable& p, const JointTable& q) {
  if (p.scope().size() != q.scope().size() || p.size() != q.size()) {
    throw InputError("kl_divergence: scope mismatch");
  }
  for (std::size_t i = 0; i < p.scope().size(); ++i) {
    if (p.scope()[i].name != q.scope()[i].name ||
        p.scope()[i].domain != q.scope()[i].domain) {
      throw InputError("kl_divergence: scope mismatch");
    }
  }
  Kahan acc;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) {
      throw AbsoluteContinuityError(
          "kl_divergence: q vanishes where p has mass");
    }
    acc.add(p[i] * std::log(p[i] / q[i]));
  }
  return acc.value();
}

double expected_value(const JointTable& t,
                      const std::map<std::string, double>& numeric) {
  if (t.scope().size() != 1) {
    throw InputError("expected_value: table must have a single variable");
  }
  const auto& dom = t.scope()[0].domain;
  Kahan acc;
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto it = numeric.find(dom[i]);
    if (it == numeric.end()) {
      throw InputError("expected_value: no numeric mapping for symbol '" +
                       dom[i] + "'");
    }
    acc.add(t[i] * it->second);
  }
  return acc.value();
}

}  // namespace csimit
