#include "evohull/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "evohull/error.hpp"
#include "evohull/random.hpp"

namespace evohull {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.size() < 2) throw Error(ErrorCode::InvalidInput, "alphabet needs at least two symbols");
  std::set<std::string> seen(symbols_.begin(), symbols_.end());
  if (seen.size() != symbols_.size()) throw Error(ErrorCode::InvalidInput, "alphabet symbols must be distinct");
}

Alphabet Alphabet::integers(std::size_t size) {
  std::vector<std::string> tokens;
  tokens.reserve(size);
  for (std::size_t i = 0; i < size; ++i) tokens.push_back(std::to_string(i));
  return Alphabet(std::move(tokens));
}

std::optional<std::size_t> Alphabet::index_of(const std::string& token) const {
  auto it = std::find(symbols_.begin(), symbols_.end(), token);
  if (it == symbols_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - symbols_.begin());
}

std::string to_string(const Genotype& g, const Alphabet& alphabet) {
  const bool single_char = std::all_of(alphabet.symbols().begin(), alphabet.symbols().end(),
                                       [](const std::string& s) { return s.size() == 1; });
  std::string out;
  for (std::size_t i = 0; i < g.symbols.size(); ++i) {
    if (!single_char && i > 0) out += ',';
    out += alphabet.symbol(g.symbols[i]);
  }
  return out;
}

Genotype parse_genotype(const std::string& text, const Alphabet& alphabet) {
  const bool single_char = std::all_of(alphabet.symbols().begin(), alphabet.symbols().end(),
                                       [](const std::string& s) { return s.size() == 1; });
  std::vector<std::string> tokens;
  if (single_char) {
    for (char c : text) tokens.emplace_back(1, c);
  } else {
    std::string cur;
    for (char c : text) {
      if (c == ',') {
        tokens.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!text.empty()) tokens.push_back(cur);
  }
  Genotype g;
  g.symbols.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto idx = alphabet.index_of(t);
    if (!idx) throw Error(ErrorCode::InvalidGenotype, "token '" + t + "' not in alphabet");
    g.symbols.push_back(static_cast<std::uint32_t>(*idx));
  }
  return g;
}

Codec::Codec(std::string name, Alphabet alphabet, std::size_t length, std::size_t phenotype_dim,
             DecodeFn decode, EncodeFn encode, RangeFn in_range)
    : name_(std::move(name)),
      alphabet_(std::move(alphabet)),
      length_(length),
      phenotype_dim_(phenotype_dim),
      decode_(std::move(decode)),
      encode_(std::move(encode)),
      in_range_(std::move(in_range)) {
  if (length_ == 0) throw Error(ErrorCode::InvalidInput, "codec length must be positive");
  if (!decode_) throw Error(ErrorCode::InvalidInput, "codec needs a decode rule");
}

void Codec::validate(const Genotype& s) const {
  if (s.length() != length_) {
    throw Error(ErrorCode::InvalidGenotype, "length " + std::to_string(s.length()) + " != " +
                                                std::to_string(length_) + " for codec " + name_);
  }
  for (std::size_t i = 0; i < s.symbols.size(); ++i) {
    if (s.symbols[i] >= alphabet_.size()) {
      throw Error(ErrorCode::InvalidGenotype,
                  "symbol index " + std::to_string(s.symbols[i]) + " at locus " + std::to_string(i) +
                      " outside alphabet of size " + std::to_string(alphabet_.size()));
    }
  }
}

Phenotype Codec::decode(const Genotype& s) const {
  validate(s);
  return decode_(s);
}

Genotype Codec::encode(std::span<const double> x) const {
  if (!encode_) throw Error(ErrorCode::UnsupportedOperation, "codec " + name_ + " has no inverse");
  if (x.size() != phenotype_dim_) {
    throw Error(ErrorCode::OutOfRange, "phenotype dimension " + std::to_string(x.size()) + " != " +
                                           std::to_string(phenotype_dim_));
  }
  return encode_(x);
}

bool Codec::in_range(const Genotype& s) const {
  validate(s);
  return in_range_ ? in_range_(s) : true;
}

namespace {

std::uint64_t bits_to_uint(std::span<const std::uint32_t> bits) {
  std::uint64_t v = 0;
  for (auto b : bits) v = (v << 1) | (b & 1u);
  return v;
}

void uint_to_bits(std::uint64_t v, std::span<std::uint32_t> out) {
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = static_cast<std::uint32_t>(v & 1u);
    v >>= 1;
  }
}

std::uint64_t gray_to_rank(std::uint64_t g) {
  for (std::uint64_t shift = 1; shift < 64; shift <<= 1) g ^= g >> shift;
  return g;
}

std::uint64_t rank_to_gray(std::uint64_t r) { return r ^ (r >> 1); }

void check_bits(std::size_t bits) {
  if (bits == 0 || bits > 52) throw Error(ErrorCode::InvalidInput, "bit width must be in [1, 52]");
}

// Integer-valued phenotype entries must be exact non-negative integers below 2^bits.
std::uint64_t integer_from_phenotype(double x, std::size_t bits) {
  const double top = std::ldexp(1.0, static_cast<int>(bits));
  if (!(x >= 0.0) || x >= top || std::floor(x) != x) {
    throw Error(ErrorCode::OutOfRange, "value " + std::to_string(x) + " not representable in " +
                                           std::to_string(bits) + " bits");
  }
  return static_cast<std::uint64_t>(x);
}

}  // namespace

Codec binary_integer_codec(std::size_t length) {
  check_bits(length);
  return Codec(
      "binary-integer", Alphabet::binary(), length, 1,
      [](const Genotype& s) { return Phenotype{double(bits_to_uint(s.symbols))}; },
      [length](std::span<const double> x) {
        Genotype g;
        g.symbols.resize(length);
        uint_to_bits(integer_from_phenotype(x[0], length), g.symbols);
        return g;
      });
}

Codec gray_codec(std::size_t length) {
  check_bits(length);
  return Codec(
      "gray", Alphabet::binary(), length, 1,
      [](const Genotype& s) { return Phenotype{double(gray_to_rank(bits_to_uint(s.symbols)))}; },
      [length](std::span<const double> x) {
        Genotype g;
        g.symbols.resize(length);
        uint_to_bits(rank_to_gray(integer_from_phenotype(x[0], length)), g.symbols);
        return g;
      });
}

Codec scaled_real_codec(std::size_t bits_per_dim, std::vector<Bounds> bounds, bool gray) {
  check_bits(bits_per_dim);
  if (bounds.empty()) throw Error(ErrorCode::InvalidInput, "scaled-real codec needs at least one dimension");
  for (const auto& b : bounds) {
    if (!(b.lo < b.hi)) throw Error(ErrorCode::InvalidInput, "scaled-real bounds need lo < hi");
  }
  const std::size_t dims = bounds.size();
  const double steps = std::ldexp(1.0, static_cast<int>(bits_per_dim)) - 1.0;
  auto decode = [=](const Genotype& s) {
    Phenotype x(dims);
    for (std::size_t d = 0; d < dims; ++d) {
      std::uint64_t k = bits_to_uint(std::span(s.symbols).subspan(d * bits_per_dim, bits_per_dim));
      if (gray) k = gray_to_rank(k);
      const double t = double(k) / steps;
      // Exact endpoints: all-zeros is lo and all-ones is hi.
      x[d] = (k == 0) ? bounds[d].lo : (double(k) == steps ? bounds[d].hi
                                                            : bounds[d].lo + t * (bounds[d].hi - bounds[d].lo));
    }
    return x;
  };
  auto encode = [=](std::span<const double> x) {
    Genotype g;
    g.symbols.resize(dims * bits_per_dim);
    for (std::size_t d = 0; d < dims; ++d) {
      const double width = bounds[d].hi - bounds[d].lo;
      const double slack = 1e-9 * width;
      if (x[d] < bounds[d].lo - slack || x[d] > bounds[d].hi + slack) {
        throw Error(ErrorCode::OutOfRange, "coordinate " + std::to_string(d) + " outside its bounds");
      }
      const double k = std::round((x[d] - bounds[d].lo) / width * steps);
      const double back = bounds[d].lo + k / steps * width;
      if (std::abs(back - x[d]) > slack) {
        throw Error(ErrorCode::OutOfRange, "coordinate " + std::to_string(d) + " is not a grid point");
      }
      std::uint64_t ki = static_cast<std::uint64_t>(k);
      if (gray) ki = rank_to_gray(ki);
      uint_to_bits(ki, std::span(g.symbols).subspan(d * bits_per_dim, bits_per_dim));
    }
    return g;
  };
  return Codec(gray ? "scaled-real-gray" : "scaled-real", Alphabet::binary(), dims * bits_per_dim, dims,
               decode, encode);
}

Codec symbol_vector_codec(Alphabet alphabet, std::size_t length) {
  const std::size_t n = alphabet.size();
  return Codec(
      "symbol-vector", std::move(alphabet), length, length,
      [](const Genotype& s) { return Phenotype(s.symbols.begin(), s.symbols.end()); },
      [n](std::span<const double> x) {
        Genotype g;
        for (double v : x) {
          if (!(v >= 0.0) || v >= double(n) || std::floor(v) != v) {
            throw Error(ErrorCode::OutOfRange, "symbol index " + std::to_string(v) + " out of range");
          }
          g.symbols.push_back(static_cast<std::uint32_t>(v));
        }
        return g;
      });
}

Codec unary_identity_codec(std::size_t length) {
  return Codec(
      "unary", Alphabet({"a", "b"}), length, 1, [](const Genotype&) { return Phenotype{0.0}; }, {},
      [](const Genotype& s) {
        return std::all_of(s.symbols.begin(), s.symbols.end(), [](std::uint32_t v) { return v == 0; });
      });
}

Codec codec_from_json(const nlohmann::json& doc) {
  try {
    const std::string rule = doc.at("rule").get<std::string>();
    const std::size_t length = doc.at("length").get<std::size_t>();
    if (doc.contains("alphabet")) {
      auto tokens = doc.at("alphabet").get<std::vector<std::string>>();
      if (tokens != std::vector<std::string>{"0", "1"}) {
        throw Error(ErrorCode::InvalidConfig, "rule " + rule + " requires the alphabet [\"0\", \"1\"]");
      }
    }
    if (rule == "binary-integer") return binary_integer_codec(length);
    if (rule == "gray") return gray_codec(length);
    if (rule == "scaled-real") {
      std::vector<Bounds> bounds;
      for (const auto& b : doc.at("bounds")) bounds.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
      return scaled_real_codec(length, std::move(bounds), doc.value("gray", false));
    }
    throw Error(ErrorCode::InvalidConfig, "unknown codec rule '" + rule + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("codec description: ") + e.what());
  }
}

std::vector<Genotype> enumerate_strings(std::size_t alphabet_size, std::size_t length) {
  std::vector<Genotype> out;
  Genotype g;
  g.symbols.assign(length, 0);
  for (;;) {
    out.push_back(g);
    std::size_t i = length;
    while (i > 0) {
      --i;
      if (++g.symbols[i] < alphabet_size) break;
      g.symbols[i] = 0;
      if (i == 0) return out;
    }
    if (length == 0) return out;
  }
}

namespace {

Genotype random_genotype(RandomStream& rng, std::size_t alphabet_size, std::size_t length) {
  Genotype g;
  g.symbols.resize(length);
  for (auto& s : g.symbols) s = static_cast<std::uint32_t>(rng.uniform_index(alphabet_size));
  return g;
}

}  // namespace

BijectionReport verify_bijection(const Codec& codec, std::size_t budget, std::uint64_t seed) {
  if (budget == 0) throw Error(ErrorCode::InvalidParams, "bijection budget must be >= 1");
  BijectionReport report;
  const double space = std::pow(double(codec.alphabet().size()), double(codec.length()));
  std::vector<Genotype> cases;
  if (space <= double(budget)) {
    report.exhaustive = true;
    cases = enumerate_strings(codec.alphabet().size(), codec.length());
  } else {
    RandomStream rng(seed);
    std::set<Genotype> seen;
    for (std::size_t i = 0; i < budget; ++i) {
      Genotype g = random_genotype(rng, codec.alphabet().size(), codec.length());
      if (seen.insert(g).second) cases.push_back(std::move(g));
    }
  }
  std::map<Phenotype, Genotype> image;
  for (const auto& g : cases) {
    ++report.cases_checked;
    Phenotype x = codec.decode(g);
    auto [it, inserted] = image.emplace(x, g);
    if (!inserted) report.collisions.emplace_back(it->second, g);
    if (codec.has_inverse()) {
      bool ok = false;
      try {
        ok = codec.encode(x) == g;
      } catch (const Error&) {
        ok = false;
      }
      if (!ok) report.roundtrip_failures.push_back(g);
    }
  }
  return report;
}

namespace {

void validate_distribution(std::span<const double> dist) {
  if (dist.empty()) throw Error(ErrorCode::InvalidDistribution, "empty distribution");
  double sum = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0)) throw Error(ErrorCode::InvalidDistribution, "negative or NaN probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kDistributionTolerance) {
    throw Error(ErrorCode::InvalidDistribution, "probabilities sum to " + std::to_string(sum));
  }
}

}  // namespace

double shannon_entropy(std::span<const double> dist) {
  validate_distribution(dist);
  double h = 0.0;
  for (double p : dist) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double renyi2_entropy(std::span<const double> dist) {
  validate_distribution(dist);
  double collision = 0.0;
  for (double p : dist) collision += p * p;
  return -std::log2(collision);
}

LocusEntropy mean_locus_entropy(std::span<const Genotype> members, std::size_t alphabet_size) {
  LocusEntropy out;
  if (members.empty()) return out;
  const std::size_t length = members.front().length();
  if (length == 0) return out;
  std::vector<double> freq(alphabet_size);
  for (std::size_t locus = 0; locus < length; ++locus) {
    std::fill(freq.begin(), freq.end(), 0.0);
    for (const auto& g : members) freq.at(g.symbols.at(locus)) += 1.0;
    for (double& f : freq) f /= double(members.size());
    out.shannon += shannon_entropy(freq);
    out.renyi2 += renyi2_entropy(freq);
  }
  out.shannon /= double(length);
  out.renyi2 /= double(length);
  return out;
}

Partition induce_partition(const std::vector<Genotype>& universe, const EquivalenceRelation& relation,
                           std::size_t samples, std::uint64_t seed) {
  Partition p;
  p.universe = universe;
  if (universe.empty()) return p;

  RandomStream rng(seed);
  const auto name = [](const Genotype& g) {
    std::string s;
    for (auto v : g.symbols) s += std::to_string(v);
    return s;
  };
  for (std::size_t i = 0; i < samples; ++i) {
    const auto& a = universe[rng.uniform_index(universe.size())];
    const auto& b = universe[rng.uniform_index(universe.size())];
    if (!relation(a, a)) throw Error(ErrorCode::InvalidRelation, "not reflexive at " + name(a));
    if (relation(a, b) != relation(b, a)) {
      throw Error(ErrorCode::InvalidRelation, "not symmetric on (" + name(a) + ", " + name(b) + ")");
    }
  }

  // Each element joins the first cell whose representative it relates to.
  std::vector<std::size_t> cell_of(universe.size());
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    std::size_t c = 0;
    for (; c < members.size(); ++c) {
      if (relation(universe[i], universe[members[c].front()])) break;
    }
    if (c == members.size()) members.emplace_back();
    members[c].push_back(i);
    cell_of[i] = c;
  }

  // Transitivity on sampled triples (x, rep, y): x ~ rep and rep ~ y were
  // established above, so x ~ y must hold.
  for (std::size_t i = 0; i < samples; ++i) {
    const auto& cell = members[rng.uniform_index(members.size())];
    const auto& x = universe[cell[rng.uniform_index(cell.size())]];
    const auto& y = universe[cell[rng.uniform_index(cell.size())]];
    if (!relation(x, y)) {
      throw Error(ErrorCode::InvalidRelation, "not transitive on triple (" + name(x) + ", " +
                                                  name(universe[cell.front()]) + ", " + name(y) + ")");
    }
  }

  p.cells.reserve(members.size());
  for (const auto& cell : members) {
    std::vector<Genotype> c;
    c.reserve(cell.size());
    for (auto idx : cell) c.push_back(universe[idx]);
    p.cells.push_back(std::move(c));
  }
  return p;
}

bool verify_partition(const Partition& p) {
  std::set<Genotype> universe(p.universe.begin(), p.universe.end());
  std::set<Genotype> covered;
  for (const auto& cell : p.cells) {
    if (cell.empty()) return false;
    for (const auto& g : cell) {
      if (!universe.contains(g)) return false;
      if (!covered.insert(g).second) return false;
    }
  }
  return covered.size() == universe.size();
}

}  // namespace evohull
