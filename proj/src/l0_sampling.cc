// Copyright 2026 The streamcov Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "streamcov/l0_sampling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

#include "streamcov/errors.hpp"
#include "streamcov/field.hpp"

namespace streamcov {
namespace {

const PrimeField& fingerprint_field() {
  static const PrimeField field(kMersenne61);
  return field;
}

std::size_t ceil_log2(std::uint64_t x) {
  return x <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(x - 1));
}

std::uint64_t nonzero_residue(std::uint64_t seed) { return seed % (kMersenne61 - 1) + 1; }

}  // namespace

double default_delta(std::size_t num_sets) {
  const double m = static_cast<double>(std::max<std::size_t>(num_sets, 4));
  return 1.0 / (m * std::log2(m));
}

L0Sketch::L0Sketch(std::uint64_t id_space, double delta, std::uint64_t seed)
    : id_space_(id_space), levels_(ceil_log2(id_space) + 1) {
  if (id_space == 0 || id_space >= kMersenne61) throw std::invalid_argument("id space out of range");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  const std::size_t reps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::log2(1.0 / delta))));
  const std::size_t gamma = std::max<std::size_t>(2, ceil_log2(id_space));
  reps_.reserve(reps);
  for (std::size_t j = 0; j < reps; ++j) {
    reps_.push_back(Repetition{sample_hash(gamma, kMersenne61, mix_seed(seed, 2 * j)),
                               nonzero_residue(mix_seed(seed, 2 * j + 1)),
                               std::vector<Cell>(levels_)});
  }
}

std::size_t L0Sketch::level_of(const Repetition& rep, std::uint64_t x) const {
  const std::uint64_t h = rep.level_hash(x);
  std::size_t level = 0;
  while (level + 1 < levels_ && h < (kMersenne61 >> (level + 1))) ++level;
  return level;
}

void L0Sketch::update(SetId x, int delta) {
  const std::uint64_t id = raw(x);
  if (id >= id_space_) throw std::out_of_range("set id outside sketch id space");
  const PrimeField& field = fingerprint_field();
  for (Repetition& rep : reps_) {
    std::uint64_t term = field.pow(rep.z, id);
    if (delta < 0) term = field.neg(term);
    const std::size_t top = level_of(rep, id);
    for (std::size_t level = 0; level <= top; ++level) {
      Cell& cell = rep.cells[level];
      cell.count += delta;
      cell.id_sum += delta > 0 ? id : -id;
      cell.fingerprint = field.add(cell.fingerprint, term);
    }
  }
}

L0Result L0Sketch::query() const {
  const Cell& base = reps_.front().cells.front();
  if (base.count == 0 && base.id_sum == 0 && base.fingerprint == 0) {
    return {SampleStatus::Empty, {}};
  }
  const PrimeField& field = fingerprint_field();
  for (const Repetition& rep : reps_) {
    for (std::size_t level = levels_; level-- > 0;) {
      const Cell& cell = rep.cells[level];
      if (cell.count != 1 || cell.id_sum >= id_space_) continue;
      if (cell.fingerprint == field.pow(rep.z, cell.id_sum)) {
        return {SampleStatus::Sample, make_id(cell.id_sum)};
      }
    }
  }
  return {SampleStatus::Fail, {}};
}

std::size_t L0Sketch::words() const {
  std::size_t words = 0;
  for (const Repetition& rep : reps_) words += 3 * rep.cells.size() + 1 + rep.level_hash.gamma();
  return words;
}

L0Result l0_query(const L0Sketch& sketch) { return sketch.query(); }
void l0_update(L0Sketch& sketch, SetId x, int delta) { sketch.update(x, delta); }

// --- SparseRecovery --------------------------------------------------------

SparseRecovery::SparseRecovery(std::size_t capacity, std::uint64_t id_space, std::uint64_t seed)
    : id_space_(id_space),
      width_(std::max<std::size_t>(4, capacity)),
      z_(nonzero_residue(mix_seed(seed, 0))),
      cells_(3 * width_) {
  for (std::size_t t = 0; t < 3; ++t) hashes_.push_back(sample_hash(2, kMersenne61, mix_seed(seed, t + 1)));
}

std::size_t SparseRecovery::slot(std::size_t table, std::uint64_t x) const {
  return table * width_ + hashes_[table](x) % width_;
}

std::uint64_t SparseRecovery::term(std::uint64_t x) const { return fingerprint_field().pow(z_, x); }

void SparseRecovery::apply(Cell& cell, std::uint64_t x, int delta, std::uint64_t t) {
  const PrimeField& field = fingerprint_field();
  cell.count += delta;
  cell.id_sum += delta > 0 ? x : -x;
  cell.fingerprint = delta > 0 ? field.add(cell.fingerprint, t) : field.sub(cell.fingerprint, t);
}

void SparseRecovery::update(SetId x, int delta) {
  const std::uint64_t id = raw(x);
  const std::uint64_t t = term(id);
  for (std::size_t table = 0; table < 3; ++table) apply(cells_[slot(table, id)], id, delta, t);
}

std::optional<std::vector<SetId>> SparseRecovery::decode() const {
  std::vector<Cell> cells = cells_;
  auto pure = [&](const Cell& cell) {
    return cell.count == 1 && cell.id_sum < id_space_ && cell.fingerprint == term(cell.id_sum);
  };
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (pure(cells[i])) queue.push_back(i);
  }
  std::vector<SetId> out;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    if (!pure(cells[i])) continue;
    const std::uint64_t id = cells[i].id_sum;
    out.push_back(make_id(id));
    const std::uint64_t t = term(id);
    for (std::size_t table = 0; table < 3; ++table) {
      const std::size_t s = slot(table, id);
      apply(cells[s], id, -1, t);
      if (pure(cells[s])) queue.push_back(s);
    }
  }
  for (const Cell& cell : cells) {
    if (cell.count != 0 || cell.id_sum != 0 || cell.fingerprint != 0) return std::nullopt;
  }
  std::sort(out.begin(), out.end(), [](SetId a, SetId b) { return raw(a) < raw(b); });
  return out;
}

std::size_t SparseRecovery::words() const { return 3 * cells_.size() + 1 + 3 * 2; }

// --- BatchSampler ----------------------------------------------------------

BatchSampler::BatchSampler(std::size_t r, const SamplerParams& params)
    : r_(r),
      log_r_(std::max<std::size_t>(1, ceil_log2(r))),
      partition_hash_(sample_hash(std::max<std::size_t>(2, log_r_), kMersenne61, mix_seed(params.seed, 0))),
      recovery_(4 * std::max<std::size_t>(r, 1), params.id_space, mix_seed(params.seed, 1)) {
  if (r == 0) throw std::invalid_argument("batch sampler needs r >= 1");
  const std::size_t t = std::max<std::size_t>(1, (r + log_r_ - 1) / log_r_);
  groups_.resize(t);
  for (std::size_t g = 0; g < t; ++g) {
    groups_[g].sketches.reserve(2 * log_r_);
    const std::uint64_t group_seed = mix_seed(params.seed, g + 2);
    for (std::size_t s = 0; s < 2 * log_r_; ++s) {
      groups_[g].sketches.emplace_back(params.id_space, params.delta, mix_seed(group_seed, s));
    }
  }
}

std::size_t BatchSampler::group_of(SetId x) const { return partition_hash_(raw(x)) % groups_.size(); }

void BatchSampler::update(SetId x, int delta) {
  Group& group = groups_[group_of(x)];
  group.live += delta;
  for (L0Sketch& sketch : group.sketches) sketch.update(x, delta);
  recovery_.update(x, delta);
  ++tokens_;
  sketch_updates_ += group.sketches.size();
}

std::int64_t BatchSampler::live_count() const {
  std::int64_t total = 0;
  for (const Group& group : groups_) total += group.live;
  return total;
}

std::vector<std::int64_t> BatchSampler::group_live_counts() const {
  std::vector<std::int64_t> counts;
  counts.reserve(groups_.size());
  for (const Group& group : groups_) counts.push_back(group.live);
  return counts;
}

std::vector<SetId> BatchSampler::draw(std::size_t count, std::mt19937_64& rng) {
  if (count > r_) {
    throw std::invalid_argument("requested " + std::to_string(count) + " draws from a sampler sized for " +
                                std::to_string(r_));
  }
  const std::int64_t live = live_count();
  if (live <= 0) throw EmptySupport("no live ids in sampler");
  std::uniform_int_distribution<std::int64_t> pick(0, live - 1);
  std::vector<SetId> out;
  out.reserve(count);
  while (out.size() < count) {
    std::int64_t ticket = pick(rng);
    std::size_t g = 0;
    while (ticket >= groups_[g].live) ticket -= groups_[g++].live;
    Group& group = groups_[g];
    while (true) {
      if (group.next_unused == group.sketches.size()) {
        throw GroupExhausted("group " + std::to_string(g) + " used all " +
                             std::to_string(group.sketches.size()) + " sketches");
      }
      const L0Result result = group.sketches[group.next_unused++].query();
      if (result.status == SampleStatus::Sample) {
        out.push_back(result.id);
        break;
      }
    }
  }
  return out;
}

std::vector<SetId> BatchSampler::draw_with_fallback(std::size_t count, std::mt19937_64& rng) {
  try {
    return draw(count, rng);
  } catch (const GroupExhausted&) {
    ++fallbacks_;
    const std::optional<std::vector<SetId>> support = recovery_.decode();
    if (!support || support->empty()) throw SketchFailure("sparse recovery could not decode the support");
    std::uniform_int_distribution<std::size_t> pick(0, support->size() - 1);
    std::vector<SetId> out(count);
    for (SetId& id : out) id = (*support)[pick(rng)];
    return out;
  }
}

std::size_t BatchSampler::words() const {
  std::size_t words = partition_hash_.gamma() + recovery_.words();
  for (const Group& group : groups_) {
    words += 2;
    for (const L0Sketch& sketch : group.sketches) words += sketch.words();
  }
  return words;
}

std::vector<SetId> batch_draw(BatchSampler& sampler, std::size_t count, std::mt19937_64& rng) {
  return sampler.draw(count, rng);
}

BatchSampler restricted_sampler(ReplayableStream& stream, const ElementSet& covered, double lo,
                                double hi, std::size_t r, const SamplerParams& params) {
  BatchSampler sampler(r, params);
  stream.replay([&](const StreamToken& token) {
    const auto residual = static_cast<double>(covered.count_missing(token.set.elements));
    if (residual >= lo && residual < hi) sampler.update(token.set.id, token.op == Op::Insert ? 1 : -1);
  });
  return sampler;
}

}  // namespace streamcov
