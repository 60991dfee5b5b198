#include "writor/store.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "writor/errors.hpp"
#include "writor/serialize.hpp"

namespace writor {

namespace fs = std::filesystem;

bool valid_session_id(std::string_view id) {
  if (id.empty() || id.size() > 128) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

std::string random_session_id() {
  static constexpr char kAlphabet[] = "0123456789abcdefghijklmnopqrstuvwxyz";
  thread_local std::mt19937_64 rng{std::random_device{}()};
  std::uniform_int_distribution<std::size_t> pick(0, sizeof kAlphabet - 2);
  std::string id = "s_";
  for (int i = 0; i < 16; ++i) id += kAlphabet[pick(rng)];
  return id;
}

namespace {

void require_valid(const std::string& id) {
  if (!valid_session_id(id)) throw PreconditionError("invalid session id '" + id + "'");
}

}  // namespace

Session MemorySessionStore::create(Session session) {
  require_valid(session.id);
  std::lock_guard lock(mu_);
  if (sessions_.contains(session.id)) throw ConflictError("session " + session.id + " already exists");
  if (session.revision == 0) session.revision = 1;
  sessions_[session.id] = session;
  return session;
}

std::optional<Session> MemorySessionStore::load(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second;
}

Session MemorySessionStore::compare_and_swap(Session session) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(session.id);
  if (it == sessions_.end()) throw NotFoundError("no session " + session.id);
  if (it->second.revision != session.revision) {
    throw ConflictError("session " + session.id + " changed concurrently");
  }
  session.revision += 1;
  it->second = session;
  return session;
}

std::vector<std::string> MemorySessionStore::list() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : sessions_) ids.push_back(id);
  return ids;
}

FileSessionStore::FileSessionStore(fs::path directory) : dir_(std::move(directory)) {
  fs::create_directories(dir_);
}

fs::path FileSessionStore::path_for(const std::string& id) const {
  require_valid(id);
  return dir_ / (id + ".json");
}

std::optional<Session> FileSessionStore::read(const std::string& id) const {
  fs::path p = path_for(id);
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return session_from_json(nlohmann::json::parse(ss.str()));
  } catch (const nlohmann::json::exception& e) {
    throw Error("corrupt session file " + p.string() + ": " + e.what());
  }
}

void FileSessionStore::write(const Session& session) const {
  fs::path target = path_for(session.id);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << session_to_json(session).dump(2);
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

Session FileSessionStore::create(Session session) {
  path_for(session.id);
  std::lock_guard lock(mu_);
  if (fs::exists(path_for(session.id))) throw ConflictError("session " + session.id + " already exists");
  if (session.revision == 0) session.revision = 1;
  write(session);
  return session;
}

std::optional<Session> FileSessionStore::load(const std::string& id) const {
  if (!valid_session_id(id)) return std::nullopt;
  std::lock_guard lock(mu_);
  return read(id);
}

Session FileSessionStore::compare_and_swap(Session session) {
  std::lock_guard lock(mu_);
  auto current = read(session.id);
  if (!current) throw NotFoundError("no session " + session.id);
  if (current->revision != session.revision) {
    throw ConflictError("session " + session.id + " changed concurrently");
  }
  session.revision += 1;
  write(session);
  return session;
}

std::vector<std::string> FileSessionStore::list() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.path().extension() != ".json") continue;
    std::string stem = entry.path().stem().string();
    if (valid_session_id(stem)) ids.push_back(stem);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace writor
