#include "convkg/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>

#include "convkg/error.hpp"
#include "convkg/io.hpp"
#include "convkg/text.hpp"

namespace convkg::embed {

double Cosine(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw ValidationError("vector", "dimension mismatch: " + std::to_string(a.size()) + " vs " +
                                        std::to_string(b.size()));
  }
  if (a.empty()) throw ValidationError("vector", "empty vector");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      throw ValidationError("vector", "non-finite component");
    }
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw ValidationError("vector", "zero vector has no direction");
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

Vector EmbeddingProvider::EmbedOne(const std::string& text) {
  auto out = Embed({text});
  if (out.size() != 1) throw RetriableError("provider returned " + std::to_string(out.size()) + " vectors for 1 text");
  return std::move(out.front());
}

void VectorTable::Set(const std::string& key, Vector v) {
  if (v.size() != dim_) {
    throw ValidationError("vector", "'" + key + "' has " + std::to_string(v.size()) +
                                        " components, expected " + std::to_string(dim_));
  }
  for (double x : v) {
    if (!std::isfinite(x)) throw ValidationError("vector", "'" + key + "' has a non-finite value");
  }
  table_[key] = std::move(v);
}

std::vector<Vector> VectorTable::Embed(const std::vector<std::string>& texts) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    auto it = table_.find(t);
    if (it == table_.end()) throw NotFoundError("no vector for '" + t + "'");
    out.push_back(it->second);
  }
  return out;
}

VectorTable ParseVectors(std::string_view data, const std::string& source) {
  const auto lines = io::Lines(std::string(data));
  if (lines.empty()) throw ParseError(source, 1, "dim", "missing 'dim N' header");
  std::istringstream header(lines[0]);
  std::string word;
  long long dim = 0;
  if (!(header >> word >> dim) || word != "dim" || dim <= 0) {
    throw ParseError(source, 1, "dim", "expected 'dim N' with N > 0");
  }
  VectorTable table(static_cast<std::size_t>(dim));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (text::Trim(lines[i]).empty()) continue;
    const auto tab = lines[i].find('\t');
    if (tab == std::string::npos) throw ParseError(source, i + 1, "", "expected key<TAB>values");
    const std::string key = lines[i].substr(0, tab);
    std::istringstream values(lines[i].substr(tab + 1));
    Vector v;
    std::string tok;
    while (values >> tok) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError(source, i + 1, key, "bad number '" + tok + "'");
      }
    }
    try {
      table.Set(key, std::move(v));
    } catch (const ValidationError& e) {
      throw ParseError(source, i + 1, key, e.what());
    }
  }
  return table;
}

VectorTable LoadVectors(const std::filesystem::path& path) {
  return ParseVectors(io::ReadFile(path), path.string());
}

std::string WriteVectors(const VectorTable& table) {
  std::map<std::string, const Vector*> sorted;
  for (const auto& [k, v] : table.entries()) sorted.emplace(k, &v);
  std::ostringstream out;
  out.precision(17);
  out << "dim " << table.dim() << "\n";
  for (const auto& [k, v] : sorted) {
    out << k << '\t';
    for (std::size_t i = 0; i < v->size(); ++i) out << (i ? " " : "") << (*v)[i];
    out << '\n';
  }
  return out.str();
}

namespace {

std::uint64_t Fnv1a(std::string_view s, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ULL ^ seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::vector<Vector> HashingEmbeddingProvider::Embed(const std::vector<std::string>& texts) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    Vector v(dim_, 0.0);
    const auto cps = text::CodePoints(text::AsciiLower(text::NormalizeWhitespace(t)));
    auto add = [&](std::string_view gram, std::uint64_t seed, double w) {
      const std::uint64_t h = Fnv1a(gram, seed);
      v[h % dim_] += ((h >> 63) != 0 ? -w : w);
    };
    for (std::size_t i = 0; i < cps.size(); ++i) {
      add(cps[i], 1, 1.0);
      if (i + 1 < cps.size()) add(cps[i] + cps[i + 1], 2, 0.5);
    }
    // Keeps empty and degenerate texts away from the zero vector.
    v[Fnv1a("", 3) % dim_] += 1e-3;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace convkg::embed
