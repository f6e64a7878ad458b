#include "echo_fixture.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Loopback echo server speaking the midas backend protocol"};
    std::uint16_t port = 0;
    std::string mode = "normal";
    app.add_option("--port", port, "TCP port on 127.0.0.1 (0 picks a free one)");
    app.add_option("--mode", mode, "normal, malformed or wrong-id");
    CLI11_PARSE(app, argc, argv);

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    try {
        midas::echo::Server server(midas::echo::parse_mode(mode), port);
        std::cout << "listening on " << server.address() << std::endl;
        while (!g_stop) pause();
        server.stop();
        std::cout << "served " << server.requests_served() << " request(s)" << std::endl;
    } catch (const std::exception& e) {
        std::cerr << "midas-echo: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
