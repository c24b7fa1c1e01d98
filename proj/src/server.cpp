#include "tracelens/server.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "tracelens/study.hpp"

namespace tracelens {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Reply error_reply(int status, const std::string& message) {
  return {status, json{{"error", message}}.dump() + "\n"};
}

// One write(2) per row keeps each record whole even if the process dies.
void append_atomically(const std::string& path, const std::string& data) {
  int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
  if (fd < 0) throw Error("cannot open " + path + ": " + std::strerror(errno));
  const char* p = data.data();
  std::size_t left = data.size();
  while (left > 0) {
    ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw Error("write to " + path + " failed: " + std::strerror(errno));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
}

}  // namespace

ExplorerService::ExplorerService(ServiceConfig config) : config_(std::move(config)) {
  fs::path pages_path = config_.pages_path
                            ? fs::path(*config_.pages_path)
                            : fs::path(config_.export_dir) / "pages.json";

  std::vector<fs::path> files;
  if (!fs::is_directory(config_.export_dir)) {
    throw Error("export directory not found: " + config_.export_dir);
  }
  for (const auto& entry : fs::directory_iterator(config_.export_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    if (fs::exists(pages_path) && fs::equivalent(file, pages_path)) continue;
    std::string text = read_file(file);
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("layers") ||
        !doc.contains("scenario")) {
      continue;
    }
    explanations_[file.stem().string()] = {doc["scenario"].get<std::string>(),
                                           doc.value("domain", "other"),
                                           std::move(text)};
  }

  if (fs::exists(pages_path)) {
    pages_document_ = read_file(pages_path);
    study::parse_pages(pages_document_);
    ordered_json doc = ordered_json::parse(pages_document_);
    for (const auto& page : doc["pages"]) {
      pages_[page["id"].get<std::string>()] = page.dump(2) + "\n";
    }
    have_pages_ = true;
  } else if (config_.pages_path) {
    throw Error("pages file not found: " + *config_.pages_path);
  }

  if (fs::exists(config_.ratings_path) && fs::file_size(config_.ratings_path) > 0) {
    for (const auto& r : study::parse_ratings_csv(read_file(config_.ratings_path))) {
      rated_.emplace(r.participant, r.page);
    }
  } else {
    append_atomically(config_.ratings_path, study::ratings_csv_header() + "\n");
  }
}

Reply ExplorerService::list_explanations() const {
  ordered_json list = ordered_json::array();
  for (const auto& [id, e] : explanations_) {
    list.push_back({{"id", id}, {"scenario", e.scenario}, {"domain", e.domain}});
  }
  return {200, list.dump(2) + "\n"};
}

Reply ExplorerService::get_explanation(const std::string& id) const {
  auto it = explanations_.find(id);
  if (it == explanations_.end()) return error_reply(404, "unknown explanation " + id);
  return {200, it->second.document};
}

Reply ExplorerService::list_pages() const {
  if (!have_pages_) return {200, "{\n  \"pages\": []\n}\n"};
  return {200, pages_document_};
}

Reply ExplorerService::get_page(const std::string& id) const {
  auto it = pages_.find(id);
  if (it == pages_.end()) return error_reply(404, "unknown page " + id);
  return {200, it->second};
}

Reply ExplorerService::post_rating(const std::string& body) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded()) return error_reply(400, "request body is not JSON");
  study::RatingRecord record;
  try {
    record = study::rating_from_json(doc);
  } catch (const study::RatingFormatError& e) {
    return error_reply(400, e.what());
  }
  if (auto issues = study::check_rating(record); !issues.empty()) {
    return error_reply(400, issues.front());
  }
  if (have_pages_ && !pages_.count(record.page)) {
    return error_reply(404, "unknown page " + record.page);
  }

  std::lock_guard lock(ratings_mutex_);
  if (rated_.count({record.participant, record.page})) {
    return error_reply(409, "participant " + record.participant +
                                " already rated page " + record.page);
  }
  append_atomically(config_.ratings_path, study::to_csv_row(record));
  rated_.emplace(record.participant, record.page);
  return {201, study::to_json(record).dump(2) + "\n"};
}

void ExplorerService::mount(httplib::Server& server) {
  auto send = [](httplib::Response& res, const Reply& reply) {
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  };
  server.Get("/explanations", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, list_explanations());
  });
  server.Get(R"(/explanations/([^/]+))",
             [this, send](const httplib::Request& req, httplib::Response& res) {
               send(res, get_explanation(req.matches[1]));
             });
  server.Get("/pages", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, list_pages());
  });
  server.Get(R"(/pages/([^/]+))",
             [this, send](const httplib::Request& req, httplib::Response& res) {
               send(res, get_page(req.matches[1]));
             });
  server.Post("/ratings", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, post_rating(req.body));
  });
}

}  // namespace tracelens
