#ifndef CONVKG_EMBEDDING_HPP_
#define CONVKG_EMBEDDING_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace convkg::embed {

using Vector = std::vector<double>;

// dot(a, b) / (|a| |b|). Throws ValidationError on a dimension mismatch, an
// empty or all-zero vector, or a non-finite component.
double Cosine(const Vector& a, const Vector& b);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  // One vector per input, in input order. Throws RetriableError when the
  // backing service fails and NotFoundError for a text a table lacks.
  // Implementations must tolerate concurrent calls.
  virtual std::vector<Vector> Embed(const std::vector<std::string>& texts) = 0;

  Vector EmbedOne(const std::string& text);
};

// Fixed text -> vector table, typically loaded from a vector file.
class VectorTable final : public EmbeddingProvider {
 public:
  explicit VectorTable(std::size_t dim) : dim_(dim) {}
  std::size_t dim() const override { return dim_; }
  std::vector<Vector> Embed(const std::vector<std::string>& texts) override;

  // Throws ValidationError on a wrong dimension or non-finite value.
  void Set(const std::string& key, Vector v);
  bool Contains(const std::string& key) const { return table_.count(key) > 0; }
  std::size_t size() const { return table_.size(); }
  const std::unordered_map<std::string, Vector>& entries() const { return table_; }

 private:
  std::size_t dim_;
  std::unordered_map<std::string, Vector> table_;
};

// Vector file: "dim N" header, then "key<TAB>v1 v2 ... vN" per line.
VectorTable LoadVectors(const std::filesystem::path& path);
VectorTable ParseVectors(std::string_view data, const std::string& source = "");
std::string WriteVectors(const VectorTable& table);

// Deterministic bag of hashed code-point unigrams and bigrams. Identical
// texts embed identically and shared characters raise similarity; good
// enough to run the pipeline without a model.
class HashingEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HashingEmbeddingProvider(std::size_t dim = 64) : dim_(dim) {}
  std::size_t dim() const override { return dim_; }
  std::vector<Vector> Embed(const std::vector<std::string>& texts) override;

 private:
  std::size_t dim_;
};

// POSTs {"texts": [...]} and reads {"vectors": [[...], ...]}. Only plain
// http:// endpoints are supported.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string endpoint, std::size_t dim, std::string token = "",
                        int timeout_seconds = 30);
  std::size_t dim() const override { return dim_; }
  std::vector<Vector> Embed(const std::vector<std::string>& texts) override;

 private:
  std::string endpoint_;
  std::size_t dim_;
  std::string token_;
  int timeout_seconds_;
};

}  // namespace convkg::embed

#endif  // CONVKG_EMBEDDING_HPP_
