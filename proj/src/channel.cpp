#include "cbcc/channel.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cbcc/random.hpp"

namespace cbcc {

namespace {

void check_states(const std::vector<ComplexMatrix>& states, std::size_t rows, std::size_t cols,
                  int user) {
  if (states.empty()) {
    throw InvalidInput("user " + std::to_string(user) + " needs at least one channel state");
  }
  for (std::size_t j = 0; j < states.size(); ++j) {
    const auto& h = states[j];
    const std::string name = "H_" + std::to_string(user) + "_" + std::to_string(j + 1);
    if (static_cast<std::size_t>(h.rows()) != rows || static_cast<std::size_t>(h.cols()) != cols) {
      throw InvalidInput(name + " has shape " + std::to_string(h.rows()) + "x" +
                         std::to_string(h.cols()) + ", expected " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    }
    if (!h.allFinite()) throw InvalidInput(name + " has non-finite entries");
  }
}

std::string matrix_key(int user, std::size_t j) {
  return "H_" + std::to_string(user) + "_" + std::to_string(j);
}

}  // namespace

CompoundChannelSet::CompoundChannelSet(std::size_t M, std::size_t N1, std::size_t N2,
                                       std::vector<ComplexMatrix> user1_states,
                                       std::vector<ComplexMatrix> user2_states)
    : M_(M), N1_(N1), N2_(N2), user1_(std::move(user1_states)), user2_(std::move(user2_states)) {
  if (M_ == 0 || N1_ == 0 || N2_ == 0) throw InvalidInput("antenna counts must be >= 1");
  check_states(user1_, N1_, M_, 1);
  check_states(user2_, N2_, M_, 2);
}

const ComplexMatrix& CompoundChannelSet::H(User k, std::size_t j) const {
  const auto& s = states(k);
  if (j < 1 || j > s.size()) {
    throw InvalidInput("state index " + std::to_string(j) + " out of range for user " +
                       std::to_string(static_cast<int>(k)));
  }
  return s[j - 1];
}

ComplexMatrix CompoundChannelSet::stacked(User k) const {
  return stack_rows<std::complex<double>>(states(k), static_cast<Eigen::Index>(M_));
}

ComplexMatrix CompoundChannelSet::all_rows() const {
  ComplexMatrix a = stacked(User::kOne);
  ComplexMatrix b = stacked(User::kTwo);
  ComplexMatrix out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

std::string CompoundChannelSet::row_label(std::size_t row) const {
  const std::size_t rows1 = N1_ * user1_.size();
  const int user = row < rows1 ? 1 : 2;
  const std::size_t local = row < rows1 ? row : row - rows1;
  const std::size_t n = user == 1 ? N1_ : N2_;
  return matrix_key(user, local / n + 1) + " row " + std::to_string(local % n + 1);
}

CompoundChannelSet CompoundChannelSet::swapped() const {
  return CompoundChannelSet(M_, N2_, N1_, user2_, user1_);
}

bool operator==(const CompoundChannelSet& a, const CompoundChannelSet& b) {
  auto same = [](const std::vector<ComplexMatrix>& x, const std::vector<ComplexMatrix>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].rows() != y[i].rows() || x[i].cols() != y[i].cols()) return false;
      // Bitwise comparison so that -0.0 and 0.0 differ.
      for (Eigen::Index e = 0; e < x[i].size(); ++e) {
        const auto u = x[i].data()[e];
        const auto v = y[i].data()[e];
        if (std::bit_cast<std::uint64_t>(u.real()) != std::bit_cast<std::uint64_t>(v.real()) ||
            std::bit_cast<std::uint64_t>(u.imag()) != std::bit_cast<std::uint64_t>(v.imag())) {
          return false;
        }
      }
    }
    return true;
  };
  return a.M_ == b.M_ && a.N1_ == b.N1_ && a.N2_ == b.N2_ && same(a.user1_, b.user1_) &&
         same(a.user2_, b.user2_);
}

void ChannelGenSpec::validate() const {
  if (M < 1 || N1 < 1 || N2 < 1 || J1 < 1 || J2 < 1) {
    throw InvalidInput("channel generation counts M, N1, N2, J1, J2 must all be >= 1");
  }
  if (max_resamples < 1) throw InvalidInput("max_resamples must be >= 1");
}

GenericRankReport verify_generic_rank(const CompoundChannelSet& ch, RankTolerance tol) {
  const ComplexMatrix rows = ch.all_rows();
  GenericRankReport report;
  report.total_rows = static_cast<std::size_t>(rows.rows());
  report.subset_size = std::min(ch.M(), report.total_rows);
  const std::size_t s = report.subset_size;
  const std::size_t total = report.total_rows;

  ComplexMatrix sub(static_cast<Eigen::Index>(s), rows.cols());
  auto check = [&](const std::vector<std::size_t>& pick) {
    for (std::size_t i = 0; i < s; ++i) {
      sub.row(static_cast<Eigen::Index>(i)) = rows.row(static_cast<Eigen::Index>(pick[i]));
    }
    ++report.subsets_checked;
    if (numerical_rank(sub, tol) != s) {
      report.pass = false;
      report.failures.push_back(pick);
    }
  };

  std::vector<std::size_t> pick(s);
  if (total <= kExhaustiveRowLimit) {
    report.exhaustive = true;
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    while (true) {
      check(pick);
      // Advance to the next combination in lexicographic order.
      std::size_t i = s;
      while (i > 0 && pick[i - 1] == total - s + (i - 1)) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t r = i; r < s; ++r) pick[r] = pick[r - 1] + 1;
    }
  } else {
    report.exhaustive = false;
    std::vector<std::size_t> pool(total);
    for (std::size_t draw = 0; draw < kSampledSubsetCount; ++draw) {
      RandomStream rng(0, StreamDomain::kSubsetSample, {total, s, draw});
      std::iota(pool.begin(), pool.end(), std::size_t{0});
      for (std::size_t i = 0; i < s; ++i) {
        const std::size_t r = i + static_cast<std::size_t>(rng.uniform_index(total - i));
        std::swap(pool[i], pool[r]);
      }
      std::copy_n(pool.begin(), s, pick.begin());
      std::sort(pick.begin(), pick.end());
      check(pick);
    }
  }
  return report;
}

namespace {

template <typename MakeStream>
CompoundChannelSet generate_with(const ChannelGenSpec& spec, RankTolerance tol,
                                 MakeStream make_stream) {
  spec.validate();
  const auto M = static_cast<Eigen::Index>(spec.M);
  auto draw_states = [&](RandomStream& rng, std::size_t count, std::size_t n) {
    std::vector<ComplexMatrix> states;
    states.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
      ComplexMatrix h(static_cast<Eigen::Index>(n), M);
      for (Eigen::Index r = 0; r < h.rows(); ++r) {
        for (Eigen::Index c = 0; c < M; ++c) h(r, c) = rng.complex_gaussian();
      }
      states.push_back(std::move(h));
    }
    return states;
  };

  for (std::size_t attempt = 0; attempt < spec.max_resamples; ++attempt) {
    RandomStream rng = make_stream(attempt);
    auto user1 = draw_states(rng, spec.J1, spec.N1);
    auto user2 = draw_states(rng, spec.J2, spec.N2);
    CompoundChannelSet ch(spec.M, spec.N1, spec.N2, std::move(user1), std::move(user2));
    if (verify_generic_rank(ch, tol).pass) return ch;
  }
  throw GenerationFailed("generic-rank check failed on all " + std::to_string(spec.max_resamples) +
                         " attempts for seed " + std::to_string(spec.seed));
}

}  // namespace

CompoundChannelSet generate_compound(const ChannelGenSpec& spec, RankTolerance tol) {
  return generate_with(spec, tol, [&](std::uint64_t attempt) {
    return RandomStream(spec.seed, StreamDomain::kChannel, {attempt});
  });
}

CompoundChannelSet generate_compound_keyed(const ChannelGenSpec& spec, RankTolerance tol,
                                           StreamDomain domain, std::uint64_t sub_index) {
  return generate_with(spec, tol, [&](std::uint64_t attempt) {
    return RandomStream(spec.seed, domain, {sub_index, attempt});
  });
}

std::uint64_t digest(const CompoundChannelSet& ch) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(ch.M());
  mix(ch.N(User::kOne));
  mix(ch.N(User::kTwo));
  mix(ch.J(User::kOne));
  mix(ch.J(User::kTwo));
  for (User k : {User::kOne, User::kTwo}) {
    for (const auto& m : ch.states(k)) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          mix(std::bit_cast<std::uint64_t>(m(r, c).real()));
          mix(std::bit_cast<std::uint64_t>(m(r, c).imag()));
        }
      }
    }
  }
  return h;
}

nlohmann::json to_json(const CompoundChannelSet& ch) {
  nlohmann::json doc;
  doc["M"] = ch.M();
  doc["N1"] = ch.N(User::kOne);
  doc["N2"] = ch.N(User::kTwo);
  doc["J1"] = ch.J(User::kOne);
  doc["J2"] = ch.J(User::kTwo);
  nlohmann::json matrices = nlohmann::json::object();
  for (User k : {User::kOne, User::kTwo}) {
    for (std::size_t j = 1; j <= ch.J(k); ++j) {
      const auto& m = ch.H(k, j);
      nlohmann::json entries = nlohmann::json::array();
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          entries.push_back({m(r, c).real(), m(r, c).imag()});
        }
      }
      matrices[matrix_key(static_cast<int>(k), j)] = std::move(entries);
    }
  }
  doc["matrices"] = std::move(matrices);
  return doc;
}

namespace {

std::size_t read_count(const nlohmann::json& doc, const char* field) {
  if (!doc.contains(field)) throw ParseError(std::string("missing field '") + field + "'");
  const auto& v = doc.at(field);
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() < 1) {
    throw ParseError(std::string("field '") + field + "' must be a positive integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

CompoundChannelSet channel_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("channel document must be a JSON object");
  const std::size_t M = read_count(doc, "M");
  const std::size_t N[2] = {read_count(doc, "N1"), read_count(doc, "N2")};
  const std::size_t J[2] = {read_count(doc, "J1"), read_count(doc, "J2")};
  if (!doc.contains("matrices") || !doc.at("matrices").is_object()) {
    throw ParseError("missing object field 'matrices'");
  }
  const auto& matrices = doc.at("matrices");
  if (matrices.size() != J[0] + J[1]) {
    throw ParseError("field 'matrices' has " + std::to_string(matrices.size()) +
                     " entries, expected J1 + J2 = " + std::to_string(J[0] + J[1]));
  }

  std::vector<ComplexMatrix> users[2];
  for (int u = 0; u < 2; ++u) {
    for (std::size_t j = 1; j <= J[u]; ++j) {
      const std::string key = matrix_key(u + 1, j);
      if (!matrices.contains(key)) throw ParseError("missing matrix '" + key + "'");
      const auto& entries = matrices.at(key);
      const std::size_t expected = N[u] * M;
      if (!entries.is_array() || entries.size() != expected) {
        throw ParseError("matrix '" + key + "' must hold " + std::to_string(expected) +
                         " [re, im] pairs (" + std::to_string(N[u]) + "x" + std::to_string(M) +
                         "), found " + (entries.is_array() ? std::to_string(entries.size()) : "a non-array"));
      }
      ComplexMatrix m(static_cast<Eigen::Index>(N[u]), static_cast<Eigen::Index>(M));
      for (std::size_t e = 0; e < expected; ++e) {
        const auto& pair = entries[e];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
          throw ParseError("matrix '" + key + "' entry " + std::to_string(e) +
                           " is not a [re, im] number pair");
        }
        m(static_cast<Eigen::Index>(e / M), static_cast<Eigen::Index>(e % M)) = {
            pair[0].get<double>(), pair[1].get<double>()};
      }
      users[u].push_back(std::move(m));
    }
  }
  try {
    return CompoundChannelSet(M, N[0], N[1], std::move(users[0]), std::move(users[1]));
  } catch (const InvalidInput& e) {
    throw ParseError(e.what());
  }
}

void save_channel(const CompoundChannelSet& ch, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot open '" + path.string() + "' for writing");
  out << to_json(ch).dump(2) << '\n';
  if (!out) throw InvalidInput("failed writing '" + path.string() + "'");
}

CompoundChannelSet load_channel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open channel file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  try {
    return channel_from_json(doc);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace cbcc
