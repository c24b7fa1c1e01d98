#pragma once

// JSON-over-HTTP interface used by the explorer console. Stateless apart
// from the append-only ratings file.

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tracelens/error.hpp"

namespace httplib {
class Server;
}

namespace tracelens {

struct ServiceConfig {
  // Directory of layered-explanation exports (*.json).
  std::string export_dir;
  // Ratings CSV; created with its header when missing.
  std::string ratings_path;
  // Study pages document; defaults to <export_dir>/pages.json when present.
  std::optional<std::string> pages_path;
};

struct Reply {
  int status = 200;
  std::string body;
};

class ExplorerService {
 public:
  explicit ExplorerService(ServiceConfig config);

  Reply list_explanations() const;
  Reply get_explanation(const std::string& id) const;
  Reply list_pages() const;
  Reply get_page(const std::string& id) const;
  // Validates and appends one rating row. 201 on success, 400 on a malformed
  // or out-of-range record, 404 for an unknown page, 409 when the
  // participant already rated the page.
  Reply post_rating(const std::string& body);

  void mount(httplib::Server& server);

 private:
  struct Explanation {
    std::string scenario;
    std::string domain;
    std::string document;
  };

  ServiceConfig config_;
  std::map<std::string, Explanation> explanations_;
  std::string pages_document_;
  std::map<std::string, std::string> pages_;
  bool have_pages_ = false;

  std::mutex ratings_mutex_;
  std::set<std::pair<std::string, std::string>> rated_;
};

}  // namespace tracelens
