// verifd: serves the verification API.

#include <csignal>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "verif/http_api.hpp"
#include "verif/service_config.hpp"

namespace {

verif::HttpService* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification assistant API server"};
  std::string config_path;
  int port = -1;
  std::string host;
  app.add_option("--config", config_path, "Service configuration file (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--port", port, "Listen port, overriding the config (0 picks a free port)")->check(CLI::Range(0, 65535));
  app.add_option("--host", host, "Listen address, overriding the config");
  CLI11_PARSE(app, argc, argv);

  try {
    auto config = verif::ServiceConfig::load(config_path);
    if (port >= 0) config.port = port;
    if (!host.empty()) config.host = host;

    auto services = verif::Services::build(config);
    std::cerr << "loaded " << services->claims->size() << " debunk records\n";
    auto gateway = std::make_shared<verif::Gateway>(services);
    verif::HttpService service(gateway);
    const int bound = service.bind(config.host, config.port);
    g_service = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "listening on http://" << config.host << ":" << bound << "\n";
    service.serve();
    g_service = nullptr;
  } catch (const std::exception& e) {
    std::cerr << "verifd: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
