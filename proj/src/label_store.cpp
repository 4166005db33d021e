// Copyright 2026 The micode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "micode/label_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include <fmt/format.h>

#include "micode/error.hpp"
#include "micode/text.hpp"

namespace micode {

namespace {

bool same_decision(const LabelRecord& a, const LabelRecord& b) {
  return a.utterance_id == b.utterance_id && a.source == b.source && a.codes == b.codes &&
         a.confidence == b.confidence;
}

void write_all(int fd, std::string_view data, const std::string& path) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw DataError("io_error", fmt::format("write to '{}' failed: {}", path, std::strerror(errno)));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

void sync_fd(int fd, const std::string& path) {
  if (::fdatasync(fd) != 0)
    throw DataError("io_error", fmt::format("fdatasync on '{}' failed: {}", path, std::strerror(errno)));
}

void apply(LabelView& view, const LabelRecord& r) {
  view.current.insert_or_assign({r.utterance_id, r.source.to_string()}, r);
  if (r.source.is_human()) view.verified.insert(r.utterance_id);
}

}  // namespace

std::vector<LabelRecord> LabelView::current_records() const {
  std::vector<LabelRecord> out;
  out.reserve(current.size());
  for (const auto& [key, r] : current) out.push_back(r);
  return out;
}

std::vector<LabelRecord> LabelView::human_records() const {
  std::vector<LabelRecord> out;
  for (const auto& [key, r] : current)
    if (r.source.is_human()) out.push_back(r);
  return out;
}

const LabelRecord* LabelView::find(const std::string& utterance_id, const LabelSource& source) const {
  auto it = current.find({utterance_id, source.to_string()});
  return it == current.end() ? nullptr : &it->second;
}

bool operator==(const LabelView& a, const LabelView& b) {
  if (a.verified != b.verified || a.current.size() != b.current.size()) return false;
  for (auto ia = a.current.begin(), ib = b.current.begin(); ia != a.current.end(); ++ia, ++ib) {
    if (ia->first != ib->first || !same_decision(ia->second, ib->second) ||
        ia->second.decided_at != ib->second.decided_at)
      return false;
  }
  return true;
}

struct LabelStore::Impl {
  mutable std::mutex mu;
  std::filesystem::path path;
  int fd = -1;
  int lock_fd = -1;
  std::vector<LabelRecord> log;
  std::shared_ptr<const LabelView> view = std::make_shared<const LabelView>();
  ReplayReport report;

  ~Impl() {
    if (fd >= 0) ::close(fd);
    if (lock_fd >= 0) ::close(lock_fd);  // releases the flock
  }
};

LabelStore::LabelStore() : impl_(std::make_unique<Impl>()) {}
LabelStore::~LabelStore() = default;
LabelStore::LabelStore(LabelStore&&) noexcept = default;
LabelStore& LabelStore::operator=(LabelStore&&) noexcept = default;

LabelView LabelStore::replay(const std::vector<LabelRecord>& log) {
  LabelView view;
  for (const auto& r : log) apply(view, r);
  return view;
}

LabelStore LabelStore::open(const std::filesystem::path& path) {
  LabelStore store;
  auto& im = *store.impl_;
  im.path = path;
  const std::string p = path.string();

  const std::string lock_path = p + ".lock";
  im.lock_fd = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (im.lock_fd < 0) throw DataError("io_error", fmt::format("cannot open lock file '{}'", lock_path));
  if (::flock(im.lock_fd, LOCK_EX | LOCK_NB) != 0)
    throw DataError("store_locked", fmt::format("label store '{}' is in use by another process", p));

  im.fd = ::open(p.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (im.fd < 0) throw DataError("io_error", fmt::format("cannot open label log '{}': {}", p, std::strerror(errno)));

  std::string contents;
  {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    contents = ss.str();
  }
  const std::size_t keep = contents.rfind('\n') == std::string::npos ? 0 : contents.rfind('\n') + 1;
  if (keep < contents.size()) {
    im.report.truncated_bytes = contents.size() - keep;
    if (::ftruncate(im.fd, static_cast<off_t>(keep)) != 0)
      throw DataError("io_error", fmt::format("cannot truncate torn tail of '{}'", p));
    sync_fd(im.fd, p);
    contents.resize(keep);
  }

  LabelView view;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start < contents.size()) {
    const std::size_t end = contents.find('\n', start);
    const std::string_view line(contents.data() + start, end - start);
    start = end + 1;
    ++lineno;
    if (trim(line).empty()) continue;
    LabelRecord r;
    try {
      r = parse_label_line(line);
      if (r.codes.empty() || r.codes.size() > 3) throw DataError("too_many_codes", "record must carry 1..3 codes");
    } catch (const DataError& e) {
      throw DataError("corrupt_log", fmt::format("{}:{}: {}", p, lineno, e.what()));
    }
    apply(view, r);
    im.log.push_back(std::move(r));
  }
  im.report.records = im.log.size();
  im.view = std::make_shared<const LabelView>(std::move(view));
  return store;
}

AppendOutcome LabelStore::append(LabelRecord record) {
  validate_label_record(record);
  if (record.codes.empty()) throw DataError("no_codes", "label needs at least one code");
  if (record.codes.size() > 3) throw DataError("too_many_codes", "max 3 codes");

  std::lock_guard lock(impl_->mu);
  auto& im = *impl_;
  if (const auto* existing = im.view->find(record.utterance_id, record.source);
      existing && same_decision(*existing, record))
    return {false, *existing};

  if (im.fd >= 0) {
    write_all(im.fd, to_json_line(record) + "\n", im.path.string());
    sync_fd(im.fd, im.path.string());
  }
  auto next = std::make_shared<LabelView>(*im.view);
  apply(*next, record);
  im.log.push_back(record);
  im.view = std::move(next);
  return {true, std::move(record)};
}

std::shared_ptr<const LabelView> LabelStore::snapshot() const {
  std::lock_guard lock(impl_->mu);
  return impl_->view;
}

std::vector<LabelRecord> LabelStore::log() const {
  std::lock_guard lock(impl_->mu);
  return impl_->log;
}

std::size_t LabelStore::log_size() const {
  std::lock_guard lock(impl_->mu);
  return impl_->log.size();
}

const ReplayReport& LabelStore::replay_report() const noexcept { return impl_->report; }

void LabelStore::compact() {
  std::lock_guard lock(impl_->mu);
  auto& im = *impl_;
  auto records = im.view->current_records();
  std::stable_sort(records.begin(), records.end(),
                   [](const LabelRecord& a, const LabelRecord& b) { return a.decided_at < b.decided_at; });
  if (im.fd >= 0) {
    const std::string p = im.path.string();
    const std::string tmp = p + ".compact";
    const int tfd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (tfd < 0) throw DataError("io_error", fmt::format("cannot create '{}'", tmp));
    std::string body;
    for (const auto& r : records) body += to_json_line(r) + "\n";
    write_all(tfd, body, tmp);
    sync_fd(tfd, tmp);
    ::close(tfd);
    std::filesystem::rename(tmp, im.path);
    ::close(im.fd);
    im.fd = ::open(p.c_str(), O_RDWR | O_APPEND | O_CLOEXEC);
    if (im.fd < 0) throw DataError("io_error", fmt::format("cannot reopen '{}'", p));
  }
  im.log = std::move(records);
}

}  // namespace micode
