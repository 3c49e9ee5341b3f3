#pragma once

// Genotype/phenotype representation: alphabets, fixed-length strings, the
// decoding function from strings to phenotype vectors, equivalence-induced
// partitions of the string space, and entropy diagnostics.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace evohull {

using Phenotype = std::vector<double>;

/// Ordered finite set of distinct tokens, at least two of them.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> symbols);

  static Alphabet binary() { return Alphabet({"0", "1"}); }
  /// Tokens "0", "1", ..., "size-1".
  static Alphabet integers(std::size_t size);

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::string& symbol(std::size_t index) const { return symbols_.at(index); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  std::optional<std::size_t> index_of(const std::string& token) const;

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> symbols_;
};

/// A fixed-length string of alphabet indices.
struct Genotype {
  std::vector<std::uint32_t> symbols;

  std::size_t length() const noexcept { return symbols.size(); }
  auto operator<=>(const Genotype&) const = default;
};

/// Concatenated tokens, e.g. "0110" for a binary genotype.
std::string to_string(const Genotype& g, const Alphabet& alphabet);
/// Splits `text` into single-character tokens when every token of the
/// alphabet is one character, otherwise on commas.
Genotype parse_genotype(const std::string& text, const Alphabet& alphabet);

/// The decoding function c : A^l -> H together with its optional inverse and
/// the range predicate for the valid subset of A^l.
class Codec {
 public:
  using DecodeFn = std::function<Phenotype(const Genotype&)>;
  using EncodeFn = std::function<Genotype(std::span<const double>)>;
  using RangeFn = std::function<bool(const Genotype&)>;

  Codec(std::string name, Alphabet alphabet, std::size_t length, std::size_t phenotype_dim,
        DecodeFn decode, EncodeFn encode = {}, RangeFn in_range = {});

  const std::string& name() const noexcept { return name_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t length() const noexcept { return length_; }
  std::size_t phenotype_dim() const noexcept { return phenotype_dim_; }
  bool has_inverse() const noexcept { return static_cast<bool>(encode_); }

  /// Throws InvalidGenotype on a length or alphabet mismatch.
  void validate(const Genotype& s) const;
  Phenotype decode(const Genotype& s) const;
  Genotype encode(std::span<const double> x) const;
  /// Membership in the valid subset of A^l; true everywhere when no
  /// predicate was supplied.
  bool in_range(const Genotype& s) const;

 private:
  std::string name_;
  Alphabet alphabet_;
  std::size_t length_;
  std::size_t phenotype_dim_;
  DecodeFn decode_;
  EncodeFn encode_;
  RangeFn in_range_;
};

/// Big-endian positional binary: "101" -> 5.
Codec binary_integer_codec(std::size_t length);
/// Reflected Gray code, decoded to the integer rank.
Codec gray_codec(std::size_t length);

struct Bounds {
  double lo = 0.0;
  double hi = 1.0;
};

/// `bits_per_dim` binary digits per dimension, mapped linearly onto
/// [lo, hi] so that all-zeros is lo and all-ones is hi. With `gray` the
/// per-dimension block is Gray coded before scaling.
Codec scaled_real_codec(std::size_t bits_per_dim, std::vector<Bounds> bounds, bool gray = false);
/// Phenotype is the vector of symbol indices.
Codec symbol_vector_codec(Alphabet alphabet, std::size_t length);
/// Alphabet {a, b}; only the all-"a" string is in range and every string
/// decodes to the one point {0}.
Codec unary_identity_codec(std::size_t length);

/// Builds a codec from {alphabet, length, rule, bounds}. `rule` is one of
/// "binary-integer", "gray", "scaled-real"; scaled-real reads `bounds` as
/// [[lo, hi], ...] and treats `length` as bits per dimension.
Codec codec_from_json(const nlohmann::json& doc);

struct BijectionReport {
  bool exhaustive = false;
  std::size_t cases_checked = 0;
  std::vector<std::pair<Genotype, Genotype>> collisions;
  std::vector<Genotype> roundtrip_failures;

  bool passed() const noexcept { return collisions.empty() && roundtrip_failures.empty(); }
};

/// Injectivity and round-trip check. Exhaustive when |A|^l <= budget,
/// otherwise `budget` genotypes sampled from a stream seeded with `seed`.
BijectionReport verify_bijection(const Codec& codec, std::size_t budget, std::uint64_t seed = 0);

inline constexpr double kDistributionTolerance = 1e-9;

double shannon_entropy(std::span<const double> dist);
double renyi2_entropy(std::span<const double> dist);

/// Per-locus allele frequencies averaged over loci, for both entropies.
struct LocusEntropy {
  double shannon = 0.0;
  double renyi2 = 0.0;
};
LocusEntropy mean_locus_entropy(std::span<const Genotype> members, std::size_t alphabet_size);

struct Partition {
  std::vector<Genotype> universe;
  std::vector<std::vector<Genotype>> cells;
};

using EquivalenceRelation = std::function<bool(const Genotype&, const Genotype&)>;

/// Quotient of `universe` by `relation`. Reflexivity, symmetry and
/// transitivity are sample-checked (`samples` random draws each); a
/// violation throws InvalidRelation naming the offending genotypes.
Partition induce_partition(const std::vector<Genotype>& universe, const EquivalenceRelation& relation,
                           std::size_t samples = 1000, std::uint64_t seed = 0);

bool verify_partition(const Partition& p);

/// All |A|^l strings in lexicographic order.
std::vector<Genotype> enumerate_strings(std::size_t alphabet_size, std::size_t length);

}  // namespace evohull
