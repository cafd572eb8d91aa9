#ifndef CONVKG_IO_HPP_
#define CONVKG_IO_HPP_

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

namespace convkg::io {

// Reads a whole file. Gzip-compressed input is decompressed transparently.
std::string ReadFile(const std::filesystem::path& path);

// Writes `data`, gzip-compressing when the path ends in ".gz".
void WriteFile(const std::filesystem::path& path, const std::string& data);

// Splits into lines, dropping a trailing '\r' on each line. A final newline
// does not produce an empty last line.
std::vector<std::string> Lines(const std::string& data);

std::vector<std::string> ReadLines(const std::filesystem::path& path);

// One JSON value per non-blank line. Throws ParseError naming the line.
std::vector<nlohmann::json> ReadJsonLines(const std::filesystem::path& path);

void WriteJsonLines(const std::filesystem::path& path,
                    const std::vector<nlohmann::json>& records);

// Compact single-line dump used for every line-delimited format; keys are
// emitted in sorted order so output is byte-stable.
std::string DumpLine(const nlohmann::json& j);

// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
// concurrency). Callers write results into pre-sized slots, so output order
// never depends on scheduling. The first exception thrown is rethrown.
void ParallelFor(std::size_t n, std::size_t threads,
                 const std::function<void(std::size_t)>& fn);

}  // namespace convkg::io

#endif  // CONVKG_IO_HPP_
