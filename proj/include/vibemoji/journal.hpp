#pragma once

#include <cstdio>
#include <filesystem>
#include <mutex>
#include <variant>
#include <vector>

#include "vibemoji/envelope.hpp"

namespace vibemoji {

/// Recipient confirmed receipt of an envelope.
struct DeliveryRecord {
  std::string recipient;
  MessageId id;
};

using JournalRecord = std::variant<Envelope, DeliveryRecord>;

/// Write-ahead log of relay traffic, one JSON object per line. Every append
/// reaches the OS before it returns.
class Journal {
 public:
  /// An empty path journals nothing (in-memory relay).
  explicit Journal(std::filesystem::path path);
  ~Journal();

  Journal(const Journal&) = delete;
  Journal& operator=(const Journal&) = delete;

  /// Records in append order. A torn final line is dropped and truncated.
  std::vector<JournalRecord> replay();

  void append(const JournalRecord& record);
  void sync();

 private:
  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
  std::mutex mu_;
};

}  // namespace vibemoji
