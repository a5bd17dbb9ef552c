#include "agentopt/subprocess.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "agentopt/errors.hpp"

namespace agentopt::evalsub {

LineProcess::~LineProcess() { stop(); }

void LineProcess::start(const std::vector<std::string>& argv,
                        const std::vector<std::pair<std::string, std::string>>& extra_env) {
    if (argv.empty()) throw ConfigError("child command is empty");
    int down[2];  // parent -> child
    int up[2];    // child -> parent
    if (pipe(down) != 0 || pipe(up) != 0) throw ChildExited("pipe() failed");

    pid_t pid = fork();
    if (pid < 0) throw ChildExited("fork() failed");
    if (pid == 0) {
        dup2(down[0], STDIN_FILENO);
        dup2(up[1], STDOUT_FILENO);
        close(down[0]); close(down[1]); close(up[0]); close(up[1]);
        for (const auto& [k, v] : extra_env) setenv(k.c_str(), v.c_str(), 1);
        std::vector<char*> args;
        args.reserve(argv.size() + 1);
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        execvp(args[0], args.data());
        _exit(127);
    }
    close(down[0]);
    close(up[1]);
    pid_ = pid;
    to_child_ = down[1];
    from_child_ = up[0];
    fcntl(from_child_, F_SETFL, O_NONBLOCK);
    signal(SIGPIPE, SIG_IGN);
}

void LineProcess::write_line(const std::string& line) {
    if (pid_ <= 0) throw ChildExited("child not running");
    std::string out = line;
    out.push_back('\n');
    std::size_t written = 0;
    while (written < out.size()) {
        ssize_t n = write(to_child_, out.data() + written, out.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw ChildExited("write to child failed: " + std::string(std::strerror(errno)));
        }
        written += static_cast<std::size_t>(n);
    }
}

std::optional<std::string> LineProcess::read_line(int timeout_ms) {
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    for (;;) {
        auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        auto now = std::chrono::steady_clock::now();
        if (now >= deadline) return std::nullopt;
        int wait_ms = static_cast<int>(
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
        struct pollfd pfd{from_child_, POLLIN, 0};
        int rc = poll(&pfd, 1, std::max(1, std::min(wait_ms, 100)));
        if (rc < 0) {
            if (errno == EINTR) continue;
            throw ChildExited("poll failed: " + std::string(std::strerror(errno)));
        }
        if (rc == 0) continue;
        char chunk[4096];
        ssize_t n = read(from_child_, chunk, sizeof(chunk));
        if (n > 0) {
            buffer_.append(chunk, static_cast<std::size_t>(n));
        } else if (n == 0) {
            throw ChildExited("child closed its output stream");
        } else if (errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) {
            throw ChildExited("read from child failed: " + std::string(std::strerror(errno)));
        }
    }
}

void LineProcess::stop() {
    if (pid_ <= 0) return;
    if (to_child_ >= 0) close(to_child_);
    to_child_ = -1;
    int status = 0;
    for (int i = 0; i < 50; ++i) {  // ~0.5 s of graceful waiting
        pid_t r = waitpid(pid_, &status, WNOHANG);
        if (r == pid_ || r < 0) { pid_ = -1; break; }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (pid_ > 0) {
        kill(pid_, SIGKILL);
        waitpid(pid_, &status, 0);
        pid_ = -1;
    }
    if (from_child_ >= 0) close(from_child_);
    from_child_ = -1;
    buffer_.clear();
}

}  // namespace agentopt::evalsub
