#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "hpk/compiler.hpp"
#include "hpk/error.hpp"
#include "hpk/interchange.hpp"
#include "hpk/natural_join.hpp"
#include "hpk/service.hpp"
#include "hpk/snapshot.hpp"

using namespace hpk;

namespace {

void openStore(Kernel& k, const std::string& path) {
  if (!path.empty() && std::filesystem::exists(path)) k.replaceStore(loadStore(path));
}

void saveStore(Kernel& k, const std::string& path) {
  if (!path.empty()) stabilize(k.store(), path);
}

void report(const EvalResult& r) {
  if (r.status != EvalResult::Status::Ok) {
    std::cout << statusName(r.status) << ": " << r.message << "\n";
    return;
  }
  if (r.typeText == "void") return;
  std::cout << r.valueText << " : " << r.typeText;
  if (r.id) std::cout << "  #" << r.id;
  std::cout << "\n";
}

std::string slurp(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot read " + file);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Reads clauses until a line ending in ';;' or end of input.
int repl(Kernel& k) {
  std::string buf, line;
  std::cout << "hpk> " << std::flush;
  while (std::getline(std::cin, line)) {
    bool done = line.size() >= 2 && line.compare(line.size() - 2, 2, ";;") == 0;
    buf += done ? line.substr(0, line.size() - 2) : line;
    buf += "\n";
    if (done) {
      report(evalRequest(k, mkHyperSource(buf)));
      buf.clear();
      std::cout << "hpk> " << std::flush;
    }
  }
  if (buf.find_first_not_of(" \t\n") != std::string::npos) report(evalRequest(k, mkHyperSource(buf)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyper-programming kernel"};
  app.require_subcommand(1);
  std::string store;
  app.add_option("--store", store, "snapshot file, loaded if present and written back on exit");

  auto* replCmd = app.add_subcommand("repl", "read and evaluate clauses; end each with ';;'");
  std::string file;
  auto* evalCmd = app.add_subcommand("eval", "evaluate a program file (.hsrc for hyper-programs)");
  evalCmd->add_option("FILE", file)->required();
  auto* demoCmd = app.add_subcommand("demo", "run a demonstration");
  std::string demo;
  demoCmd->add_option("NAME", demo)->required()->check(CLI::IsMember({"natural-join"}));
  auto* serveCmd = app.add_subcommand("serve", "serve the workbench API");
  int port = 8080;
  std::string host = "127.0.0.1";
  serveCmd->add_option("--port", port);
  serveCmd->add_option("--host", host);
  for (auto* c : {replCmd, evalCmd, demoCmd, serveCmd}) c->add_option("--store", store);

  CLI11_PARSE(app, argc, argv);

  try {
    Kernel k;
    openStore(k, store);
    int rc = 0;
    if (*replCmd) {
      rc = repl(k);
    } else if (*evalCmd) {
      std::string text = slurp(file);
      bool hyper = std::filesystem::path(file).extension() == ".hsrc";
      EvalResult r;
      try {
        r = evalRequest(k, hyper ? importHsrc(k.store(), text) : mkHyperSource(text));
      } catch (const Error& e) {
        r.status = EvalResult::Status::ImportError;
        r.message = e.what();
      }
      report(r);
      rc = r.status == EvalResult::Status::Ok ? 0 : 1;
    } else if (*demoCmd) {
      rc = naturalJoinDemo(k, std::cout) ? 0 : 1;
    } else if (*serveCmd) {
      Service svc(k);
      int bound = svc.bind(host, port);
      if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
      std::cout << "listening on " << host << ":" << bound << std::endl;
      // Serve on a worker thread; SIGINT/SIGTERM stop it so the store is saved.
      sigset_t stopSignals;
      sigemptyset(&stopSignals);
      sigaddset(&stopSignals, SIGINT);
      sigaddset(&stopSignals, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &stopSignals, nullptr);
      std::thread server([&] { svc.run(); });
      int sig = 0;
      sigwait(&stopSignals, &sig);
      svc.stop();
      server.join();
    }
    saveStore(k, store);
    return rc;
  } catch (const std::exception& e) {
    std::cerr << "hpk: " << e.what() << "\n";
    return 2;
  }
}
