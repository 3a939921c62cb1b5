#include "scaqfp/blocks.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

#include "scaqfp/bitonic.hpp"
#include "scaqfp/prng.hpp"
#include "scaqfp/sng.hpp"

namespace scaqfp {

std::string_view block_kind_name(BlockKind kind) {
  switch (kind) {
    case BlockKind::feature_extraction:
      return "feature_extraction";
    case BlockKind::avg_pool:
      return "avg_pool";
    case BlockKind::categorization:
      return "categorization";
  }
  throw std::invalid_argument("block_kind_name: unknown kind");
}

BlockKind block_kind_from_name(std::string_view name) {
  if (name == "feature_extraction") return BlockKind::feature_extraction;
  if (name == "avg_pool") return BlockKind::avg_pool;
  if (name == "categorization") return BlockKind::categorization;
  throw std::invalid_argument("block_kind_from_name: unknown kind '" + std::string(name) + "'");
}

std::size_t ProductMatrix::stream_length() const {
  if (rows.empty()) throw std::invalid_argument("ProductMatrix: no rows");
  const std::size_t n = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != n) throw std::invalid_argument("ProductMatrix: ragged rows");
  }
  if (n == 0) throw std::invalid_argument("ProductMatrix: empty streams");
  return n;
}

std::vector<bool> FeedbackState::carry_bits() const {
  std::vector<bool> bits(m_, false);
  std::fill(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(ones_), true);
  return bits;
}

void FeedbackState::set_ones(std::size_t ones) {
  if (ones > m_) throw std::invalid_argument("FeedbackState: carry ones exceed input size");
  ones_ = ones;
}

namespace {

std::size_t count_ones(const std::vector<bool>& column) {
  return static_cast<std::size_t>(std::count(column.begin(), column.end(), true));
}

}  // namespace

std::pair<bool, FeedbackState> fe_step(const FeedbackState& state, const std::vector<bool>& column) {
  if (column.size() != state.input_size()) throw std::invalid_argument("fe_step: column size mismatch");
  if (state.input_size() % 2 == 0) {
    throw std::invalid_argument("fe_step: input size must be odd (pad with neutral noise)");
  }
  const auto [out, next] = fe_step_counts(state.input_size(), state.ones(), count_ones(column));
  FeedbackState next_state(state.input_size());
  next_state.set_ones(next);
  return {out, next_state};
}

std::pair<bool, FeedbackState> pool_step(const FeedbackState& state, const std::vector<bool>& column) {
  if (column.size() != state.input_size()) throw std::invalid_argument("pool_step: column size mismatch");
  const auto [out, next] = pool_step_counts(state.input_size(), state.ones(), count_ones(column));
  FeedbackState next_state(state.input_size());
  next_state.set_ones(next);
  return {out, next_state};
}

std::vector<uint32_t> column_ones(const ProductMatrix& products) {
  const std::size_t n = products.stream_length();
  std::vector<uint32_t> counts(n, 0);
  for (const auto& row : products.rows) {
    const auto& words = row.words();
    for (std::size_t w = 0; w < words.size(); ++w) {
      uint64_t bits = words[w];
      while (bits != 0) {
        const auto t = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
        ++counts[t];
        bits &= bits - 1;
      }
    }
  }
  return counts;
}

BitStream fe_run(const ProductMatrix& products) {
  const std::size_t n = products.stream_length();
  const std::size_t m_rows = products.input_size();
  const bool pad = m_rows % 2 == 0;
  const std::size_t m = m_rows + (pad ? 1 : 0);

  const auto counts = column_ones(products);
  BitStream out(n);
  std::size_t carry = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t col = counts[t] + (pad && t % 2 == 0 ? 1 : 0);
    const auto [bit, next] = fe_step_counts(m, carry, col);
    if (bit) out.set_bit(t, true);
    carry = next;
  }
  return out;
}

double fe_reference(std::span<const double> values) {
  const double sum = std::accumulate(values.begin(), values.end(), 0.0);
  return std::clamp(sum, -1.0, 1.0);
}

BitStream pool_run(const ProductMatrix& products) {
  const std::size_t n = products.stream_length();
  const std::size_t m = products.input_size();
  const auto counts = column_ones(products);
  BitStream out(n);
  std::size_t carry = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const auto [bit, next] = pool_step_counts(m, carry, counts[t]);
    if (bit) out.set_bit(t, true);
    carry = next;
  }
  return out;
}

double pool_reference(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("pool_reference: no values");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

namespace {

uint64_t maj_word(uint64_t a, uint64_t b, uint64_t c) { return (a & b) | (a & c) | (b & c); }

}  // namespace

BitStream majority_chain(const std::vector<BitStream>& streams) {
  if (streams.empty()) throw std::domain_error("majority_chain: no streams");
  const std::size_t n = streams.front().size();
  for (const auto& s : streams) {
    if (s.size() != n) throw std::invalid_argument("majority_chain: length mismatch");
  }
  if (streams.size() == 1) return streams.front();

  std::vector<const BitStream*> in;
  in.reserve(streams.size() + 1);
  for (const auto& s : streams) in.push_back(&s);
  BitStream noise;
  if (in.size() % 2 == 0) {
    // the pad goes first: the chain's head is its least influential slot
    noise = neutral_noise(n);
    in.insert(in.begin(), &noise);
  }

  BitStream acc(n);
  auto& w = acc.mutable_words();
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = maj_word(in[0]->words()[i], in[1]->words()[i], in[2]->words()[i]);
  }
  for (std::size_t k = 3; k + 1 < in.size(); k += 2) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] = maj_word(w[i], in[k]->words()[i], in[k + 1]->words()[i]);
    }
  }
  return acc;
}

std::vector<std::size_t> categorize_rank(const std::vector<BitStream>& outputs) {
  if (outputs.empty()) throw std::invalid_argument("categorize_rank: no outputs");
  const std::size_t n = outputs.front().size();
  std::vector<double> value(outputs.size());
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (outputs[i].size() != n) throw std::invalid_argument("categorize_rank: length mismatch");
    value[i] = decode_stream(outputs[i], Encoding::bipolar);
  }
  std::vector<std::size_t> order(outputs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return value[a] > value[b]; });
  return order;
}

namespace {

GateNetlist build_categorization_netlist(std::size_t input_size) {
  GateNetlist net;
  const bool pad = input_size % 2 == 0;
  std::vector<NodeId> x(input_size + (pad ? 1 : 0));
  for (auto& id : x) id = net.add_input();
  if (x.size() == 1) {
    net.add_output(x[0]);
    return net;
  }
  // interface order keeps the pad input last; the chain consumes it first
  std::vector<NodeId> chain_order;
  if (pad) chain_order.push_back(x.back());
  chain_order.insert(chain_order.end(), x.begin(), x.end() - (pad ? 1 : 0));

  NodeId acc = net.add_gate(NodeKind::maj3, {chain_order[0], chain_order[1], chain_order[2]});
  for (std::size_t k = 3; k + 1 < chain_order.size(); k += 2) {
    acc = net.add_gate(NodeKind::maj3, {acc, chain_order[k], chain_order[k + 1]});
  }
  net.add_output(acc);
  return net;
}

GateNetlist build_sorter_feedback_netlist(BlockKind kind, std::size_t input_size) {
  GateNetlist net;
  const bool pad = kind == BlockKind::feature_extraction && input_size % 2 == 0;
  const std::size_t m = input_size + (pad ? 1 : 0);

  std::vector<NodeId> column(m);
  for (auto& id : column) id = net.add_input();

  std::vector<NodeId> regs(m);
  for (auto& id : regs) id = net.add_reg();

  emit_bitonic_sorter(net, column, SortDirection::descending);

  // Merge the freshly sorted column with the already-sorted carry. The carry
  // registers are wired in reverse so the merger sees descending ++ ascending.
  std::vector<NodeId> merged(2 * m);
  std::copy(column.begin(), column.end(), merged.begin());
  for (std::size_t i = 0; i < m; ++i) merged[m + i] = regs[m - 1 - i];
  emit_bitonic_merger(net, merged, SortDirection::descending);

  if (kind == BlockKind::feature_extraction) {
    const std::size_t out_pos = (m - 1) / 2;
    net.add_output(merged[out_pos]);
    for (std::size_t i = 0; i < m; ++i) {
      net.connect_reg(regs[i], merged[(m + 1) / 2 + i]);
    }
  } else {
    const NodeId out = merged[m - 1];
    net.add_output(out);
    // Select between retaining the top M bits and consuming the top M ones.
    // merged[i] >= merged[m+i] always holds, so the 2:1 select collapses to
    // MAJ3(!out, top, bottom): !out picks OR (= top), out picks AND (= bottom).
    const NodeId sel_not = net.add_gate(NodeKind::inv, {out});
    for (std::size_t i = 0; i < m; ++i) {
      const NodeId next = net.add_gate(NodeKind::maj3, {sel_not, merged[i], merged[m + i]});
      net.connect_reg(regs[i], next);
    }
  }
  net.check();
  return net;
}

}  // namespace

GateNetlist build_block_netlist(BlockKind kind, std::size_t input_size) {
  if (input_size < 1) throw std::domain_error("build_block_netlist: input size must be >= 1");
  if (kind == BlockKind::categorization) return build_categorization_netlist(input_size);
  return build_sorter_feedback_netlist(kind, input_size);
}

BitStream run_block_netlist(const GateNetlist& net, const ProductMatrix& products) {
  const std::size_t n = products.stream_length();
  const std::size_t m_rows = products.input_size();
  if (net.num_inputs() != m_rows && net.num_inputs() != m_rows + 1) {
    throw std::invalid_argument("run_block_netlist: netlist inputs do not match matrix rows");
  }
  const bool feed_noise = net.num_inputs() == m_rows + 1;
  if (net.num_outputs() != 1) {
    throw std::invalid_argument("run_block_netlist: expected a single-output block");
  }

  CycleSimulator sim(net);
  std::vector<uint8_t> inputs(net.num_inputs(), 0);
  BitStream out(n);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t j = 0; j < m_rows; ++j) inputs[j] = products.rows[j].bit(t) ? 1 : 0;
    if (feed_noise) inputs[m_rows] = t % 2 == 0 ? 1 : 0;
    const auto outputs = sim.step(inputs);
    if (outputs[0] != 0) out.set_bit(t, true);
  }
  return out;
}

ProductMatrix make_product_matrix(std::span<const double> values, std::size_t length,
                                  uint64_t seed, unsigned n_bits) {
  ProductMatrix pm;
  pm.rows.reserve(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    RandomWordSource source(derive_seed(seed, j), n_bits);
    pm.rows.push_back(generate_stream(encode_bipolar(values[j], n_bits), source, length));
  }
  return pm;
}

namespace {

/// Column popcount pmf for independent rows: iterated convolution.
std::vector<double> poisson_binomial_pmf(std::span<const double> probs) {
  std::vector<double> pmf = {1.0};
  for (double p : probs) {
    std::vector<double> next(pmf.size() + 1, 0.0);
    for (std::size_t k = 0; k < pmf.size(); ++k) {
      next[k] += pmf[k] * (1.0 - p);
      next[k + 1] += pmf[k] * p;
    }
    pmf = std::move(next);
  }
  return pmf;
}

}  // namespace

double fe_stationary_value(std::span<const double> one_densities) {
  const std::size_t m = one_densities.size();
  if (m == 0 || m % 2 == 0) {
    throw std::invalid_argument("fe_stationary_value: input size must be odd and positive");
  }
  for (double p : one_densities) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("fe_stationary_value: density outside [0,1]");
  }
  const std::size_t thr = (m + 1) / 2;
  const auto pmf = poisson_binomial_pmf(one_densities);

  std::vector<double> pi(m + 1, 1.0 / static_cast<double>(m + 1));
  std::vector<double> next(m + 1);
  for (int it = 0; it < 512; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t c = 0; c <= m; ++c) {
      if (pi[c] == 0.0) continue;
      for (std::size_t k = 0; k <= m; ++k) {
        const auto [out, cn] = fe_step_counts(m, c, k);
        (void)out;
        next[cn] += pi[c] * pmf[k];
      }
    }
    std::swap(pi, next);
  }

  double e_out = 0.0;
  for (std::size_t c = 0; c <= m; ++c) {
    double tail = 0.0;
    for (std::size_t k = 0; k <= m; ++k) {
      if (c + k >= thr) tail += pmf[k];
    }
    e_out += pi[c] * tail;
  }
  return 2.0 * e_out - 1.0;
}

double chain_probability(std::span<const double> one_densities) {
  if (one_densities.empty()) throw std::domain_error("chain_probability: no densities");
  for (double p : one_densities) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("chain_probability: density outside [0,1]");
  }
  std::vector<double> p(one_densities.begin(), one_densities.end());
  if (p.size() == 1) return p[0];
  if (p.size() % 2 == 0) p.insert(p.begin(), 0.5);  // pad first, as majority_chain does
  auto maj3 = [](double a, double b, double c) { return a * b + a * c + b * c - 2.0 * a * b * c; };
  double y = maj3(p[0], p[1], p[2]);
  for (std::size_t k = 3; k + 1 < p.size(); k += 2) {
    y = maj3(y, p[k], p[k + 1]);
  }
  return y;
}

}  // namespace scaqfp
