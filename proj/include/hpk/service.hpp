#pragma once

#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

#include "hpk/browser.hpp"
#include "hpk/kernel.hpp"

namespace httplib {
class Server;
}

namespace hpk {

struct EvalResult {
  enum class Status { Ok, CompileError, RuntimeFault, ImportError };
  Status status = Status::Ok;
  ObjectId id = 0;        // retained result object; 0 for scalars and void
  std::string typeText;   // static type of the program
  std::string valueText;  // short rendering of the result
  std::string message;    // error text
};

const char* statusName(EvalResult::Status s);

// Compiles and runs `h`. An object result is retained in the store until
// released, so it stays displayable and linkable.
EvalResult evalRequest(Kernel& k, const HyperSource& h);

nlohmann::json displayJson(const DisplayModel& m);
// Code text plus one token per link: region, kind, label, and the target
// object id or the linked type's text.
nlohmann::json sourceJson(Store& store, const HyperSource& h);

// The workbench API. Every request runs under one lock, so evaluations and
// admin operations are serialised.
//
//   GET    /root                    display of the root environment
//   GET    /object/{id}             display model
//   GET    /object/{id}/type        {type}
//   GET    /proc/{id}/source        {text, tokens}
//   POST   /eval                    {text} or {hsrc} -> result descriptor
//   DELETE /result/{id}             release a retained result
//   GET    /shared-table            {entries}
//   POST   /shared-table            {name, path}
//   DELETE /shared-table/{name}
//   POST   /admin/stabilize         {path}
//   POST   /admin/load              {path}
class Service {
 public:
  explicit Service(Kernel& k);
  ~Service();

  struct Response {
    int status = 200;
    nlohmann::json body;
  };

  // Routes one request without any networking.
  Response handle(const std::string& method, const std::string& path, const std::string& body);

  // Binds to host:port (port 0 picks a free one) and returns the port.
  int bind(const std::string& host, int port);
  // Serves until stop(); call after bind.
  void run();
  void stop();

 private:
  Response route(const std::string& method, const std::string& path, const nlohmann::json& body);

  Kernel& kernel_;
  Browser browser_;
  std::mutex mutex_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace hpk
