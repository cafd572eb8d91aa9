#include "convkg/io.hpp"

#include <zlib.h>

#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>

#include "convkg/error.hpp"
#include "convkg/text.hpp"

namespace convkg::io {

std::string ReadFile(const std::filesystem::path& path) {
  // gzopen reads uncompressed files transparently.
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw Error("cannot open " + path.string());
  std::string out;
  char buf[1 << 16];
  while (true) {
    const int n = gzread(f, buf, sizeof(buf));
    if (n < 0) {
      int errnum = 0;
      std::string msg = gzerror(f, &errnum);
      gzclose(f);
      throw Error("read error in " + path.string() + ": " + msg);
    }
    if (n == 0) break;
    out.append(buf, static_cast<std::size_t>(n));
  }
  gzclose(f);
  return out;
}

void WriteFile(const std::filesystem::path& path, const std::string& data) {
  if (text::EndsWith(path.string(), ".gz")) {
    gzFile f = gzopen(path.c_str(), "wb");
    if (f == nullptr) throw Error("cannot open " + path.string());
    std::size_t off = 0;
    while (off < data.size()) {
      const auto chunk =
          static_cast<unsigned>(std::min<std::size_t>(data.size() - off, 1u << 20));
      if (gzwrite(f, data.data() + off, chunk) != static_cast<int>(chunk)) {
        gzclose(f);
        throw Error("write error in " + path.string());
      }
      off += chunk;
    }
    if (gzclose(f) != Z_OK) throw Error("write error in " + path.string());
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error("write error in " + path.string());
}

std::vector<std::string> Lines(const std::string& data) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < data.size()) {
    std::size_t end = data.find('\n', start);
    if (end == std::string::npos) end = data.size();
    std::string line = data.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> ReadLines(const std::filesystem::path& path) {
  return Lines(ReadFile(path));
}

std::vector<nlohmann::json> ReadJsonLines(const std::filesystem::path& path) {
  std::vector<nlohmann::json> out;
  const auto lines = ReadLines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::Trim(lines[i]).empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(lines[i]));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path.string(), i + 1, "", e.what());
    }
  }
  return out;
}

std::string DumpLine(const nlohmann::json& j) {
  // nlohmann::json objects are std::map-backed, so keys are already sorted.
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

void WriteJsonLines(const std::filesystem::path& path,
                    const std::vector<nlohmann::json>& records) {
  std::string data;
  for (const auto& r : records) {
    data += DumpLine(r);
    data += '\n';
  }
  WriteFile(path, data);
}

void ParallelFor(std::size_t n, std::size_t threads,
                 const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) return;
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!first_error) first_error = std::current_exception();
            next.store(n);
            return;
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace convkg::io
