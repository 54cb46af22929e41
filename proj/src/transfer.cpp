#include "gchain/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "gchain/errors.hpp"

namespace gchain {

CylinderFunction CylinderFunction::indicator(std::size_t q, Symbol symbol) {
  require(symbol < q, "indicator: symbol outside alphabet");
  CylinderFunction f;
  f.window = 1;
  f.values.assign(q, 0.0);
  f.values[symbol] = 1.0;
  return f;
}

CylinderFunction CylinderFunction::lifted(std::size_t q, int new_window) const {
  require(new_window >= window, "lifted: window can only grow");
  const std::size_t factor = checked_power(q, new_window - window, std::size_t{1} << 26);
  CylinderFunction g;
  g.window = new_window;
  g.values.resize(values.size() * factor);
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = values[i / factor];
  return g;
}

double oscillation(std::span<const double> f) {
  if (f.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  return *hi - *lo;
}

TransferOperator::TransferOperator(GModel model, int window, std::size_t state_budget)
    : model_(std::move(model)), window_(window), q_(model_.q()) {
  require(model_.kind() == GModel::Kind::FiniteMemory, "transfer operator needs a finite-memory model");
  const int M = model_.memory();
  if (window_ == 0) window_ = std::max(M, 1);
  require(window_ >= std::max(M, 1), "transfer window must be at least max(memory, 1)");
  dim_ = checked_power(q_, window_, state_budget);
  tail_divisor_ = checked_power(q_, window_ - M, state_budget);
  context_count_ = checked_power(q_, M, state_budget);
}

double TransferOperator::weight(std::size_t x, Symbol s) const {
  // g(s, x_0 .. x_{M-1}) with table index s * q^M + (x_0..x_{M-1}).
  return model_.table()[s * context_count_ + x / tail_divisor_];
}

std::size_t TransferOperator::successor(std::size_t x, Symbol s) const {
  return s * (dim_ / q_) + x / q_;
}

std::vector<double> TransferOperator::apply(std::span<const double> f) const {
  require(f.size() == dim_, "transfer: function has " + std::to_string(f.size()) + " entries, expected " +
                                std::to_string(dim_));
  std::vector<double> out(dim_, 0.0);
  for (std::size_t x = 0; x < dim_; ++x) {
    double acc = 0.0;
    for (std::size_t s = 0; s < q_; ++s) acc += weight(x, Symbol(s)) * f[successor(x, Symbol(s))];
    out[x] = acc;
  }
  return out;
}

std::vector<double> TransferOperator::apply_dual(std::span<const double> mu) const {
  require(mu.size() == dim_, "transfer: measure dimension mismatch");
  std::vector<double> out(dim_, 0.0);
  for (std::size_t x = 0; x < dim_; ++x)
    for (std::size_t s = 0; s < q_; ++s) out[successor(x, Symbol(s))] += mu[x] * weight(x, Symbol(s));
  return out;
}

std::vector<double> apply_Ln(const TransferOperator& op, std::span<const double> f, int n) {
  require(n >= 0, "apply_Ln: n must be non-negative");
  std::vector<double> cur(f.begin(), f.end());
  require(cur.size() == op.state_dim(), "apply_Ln: dimension mismatch");
  for (int i = 0; i < n; ++i) cur = op.apply(cur);
  return cur;
}

double StationaryMeasure::cylinder(std::span<const Symbol> word, std::size_t q) const {
  require(static_cast<int>(word.size()) <= window, "cylinder word longer than the stationary window");
  const std::size_t block = checked_power(q, window - static_cast<int>(word.size()), std::size_t{1} << 30);
  const std::size_t base = word_index(word, q) * block;
  double p = 0.0;
  for (std::size_t i = 0; i < block; ++i) p += probs[base + i];
  return p;
}

namespace {

// Number of closed communicating classes of the state graph (Tarjan SCC).
int closed_class_count(const TransferOperator& op) {
  const std::size_t n = op.state_dim();
  const std::size_t q = op.model().q();
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  int counter = 0, comps = 0;

  // Iterative Tarjan to stay off the call stack for large windows.
  struct Frame {
    std::size_t v;
    std::size_t next_edge;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      Frame& fr = frames.back();
      if (fr.next_edge < q) {
        const Symbol s = Symbol(fr.next_edge++);
        if (op.weight(fr.v, s) <= 0.0) continue;
        const std::size_t w = op.successor(fr.v, s);
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[fr.v] = std::min(low[fr.v], index[w]);
        }
        continue;
      }
      const std::size_t v = fr.v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = comps;
        } while (w != v);
        ++comps;
      }
    }
  }
  std::vector<char> leaks(static_cast<std::size_t>(comps), 0);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t s = 0; s < q; ++s)
      if (op.weight(v, Symbol(s)) > 0.0 && comp[op.successor(v, Symbol(s))] != comp[v]) leaks[comp[v]] = 1;
  return static_cast<int>(std::count(leaks.begin(), leaks.end(), 0));
}

}  // namespace

StationaryMeasure stationary(const TransferOperator& op, double tol, int max_iterations) {
  require(tol > 0.0, "stationary: tol must be positive");
  require(max_iterations > 0, "stationary: iteration cap must be positive");
  const std::size_t n = op.state_dim();
  StationaryMeasure out;
  out.window = op.window();
  out.unique = closed_class_count(op) == 1;
  std::vector<double> mu(n, 1.0 / double(n));
  for (int it = 1; it <= max_iterations; ++it) {
    std::vector<double> next = op.apply_dual(mu);
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual += std::abs(next[i] - mu[i]);
    mu = std::move(next);
    out.iterations = it;
    out.residual = residual;
    if (residual < tol) {
      out.converged = true;
      break;
    }
  }
  const double total = std::accumulate(mu.begin(), mu.end(), 0.0);
  for (double& v : mu) v /= total;
  out.probs = std::move(mu);
  return out;
}

GModel truncated_surrogate(const GModel& model, int memory, std::size_t state_budget) {
  require(memory >= 0, "surrogate memory must be non-negative");
  if (model.kind() == GModel::Kind::FiniteMemory && model.memory() <= memory) return model;
  const std::size_t q = model.q();
  const std::size_t size = checked_power(q, memory + 1, state_budget);
  std::vector<double> table(size);
  std::vector<Symbol> word(static_cast<std::size_t>(memory) + 1);
  for (std::size_t i = 0; i < size; ++i) {
    decode_word(i, q, word);
    table[i] = model.eval(word).value;
  }
  // Reference fills are normalized up to rounding; renormalize per context.
  const std::size_t contexts = size / q;
  for (std::size_t c = 0; c < contexts; ++c) {
    double s = 0.0;
    for (std::size_t x0 = 0; x0 < q; ++x0) s += table[x0 * contexts + c];
    for (std::size_t x0 = 0; x0 < q; ++x0) table[x0 * contexts + c] /= s;
  }
  return GModel::finite_memory(model.alphabet(), memory, std::move(table));
}

std::vector<OscillationPoint> uniqueness_diagnostic(const GModel& model, const CylinderFunction& f, int n_max,
                                                    int truncation, std::size_t state_budget) {
  require(n_max >= 0, "uniqueness_diagnostic: n_max must be non-negative");
  const std::size_t q = model.q();
  require(f.values.size() == checked_power(q, f.window, state_budget), "uniqueness_diagnostic: f has wrong size");

  GModel surrogate = model;
  double defect = 0.0;  // sup_x sum_s |g(sx) - g_t(sx)|
  if (model.kind() == GModel::Kind::LongRangeLinear) {
    require(truncation >= 1, "uniqueness_diagnostic: truncation must be positive");
    checked_power(q, std::max(truncation, f.window), state_budget);
    surrogate = truncated_surrogate(model, truncation, state_budget);
    defect = 2.0 * model.theta() * model.coefficient_tail_upper(truncation);
  }
  const int window = std::max({surrogate.memory(), f.window, 1});
  TransferOperator op(surrogate, window, state_budget);
  std::vector<double> cur = f.lifted(q, window).values;

  std::vector<OscillationPoint> out;
  double osc_sum = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const double osc = oscillation(cur);
    out.push_back({n, osc, defect * osc_sum});
    osc_sum += osc;
    if (n < n_max) cur = op.apply(cur);
  }
  return out;
}

}  // namespace gchain
