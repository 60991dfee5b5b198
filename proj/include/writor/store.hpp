#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "writor/types.hpp"

namespace writor {

// Session persistence with optimistic concurrency on Session::revision.
class SessionStore {
 public:
  virtual ~SessionStore() = default;

  // Persists a new session. Revision 0 becomes 1; an imported session keeps
  // its revision. ConflictError if the id exists.
  virtual Session create(Session session) = 0;
  virtual std::optional<Session> load(const std::string& id) const = 0;

  // Writes `session` if the stored revision still equals session.revision,
  // and returns it with the revision bumped. ConflictError otherwise;
  // NotFoundError when the id is unknown.
  virtual Session compare_and_swap(Session session) = 0;

  virtual std::vector<std::string> list() const = 0;
};

class MemorySessionStore : public SessionStore {
 public:
  Session create(Session session) override;
  std::optional<Session> load(const std::string& id) const override;
  Session compare_and_swap(Session session) override;
  std::vector<std::string> list() const override;

 private:
  mutable std::mutex mu_;
  std::map<std::string, Session> sessions_;
};

// One JSON document per session under a directory, written to a temp file
// and renamed into place.
class FileSessionStore : public SessionStore {
 public:
  explicit FileSessionStore(std::filesystem::path directory);

  Session create(Session session) override;
  std::optional<Session> load(const std::string& id) const override;
  Session compare_and_swap(Session session) override;
  std::vector<std::string> list() const override;

 private:
  std::filesystem::path path_for(const std::string& id) const;
  std::optional<Session> read(const std::string& id) const;
  void write(const Session& session) const;

  std::filesystem::path dir_;
  mutable std::mutex mu_;
};

// Session ids are restricted to [A-Za-z0-9_-] so they are safe file names.
bool valid_session_id(std::string_view id);
std::string random_session_id();

}  // namespace writor
