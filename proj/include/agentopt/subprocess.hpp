#pragma once

#include <optional>
#include <string>
#include <vector>

#include <sys/types.h>

namespace agentopt::evalsub {

// A child process spoken to over a newline-delimited protocol:
// one request line down stdin, one reply line up stdout.
class LineProcess {
public:
    LineProcess() = default;
    ~LineProcess();
    LineProcess(const LineProcess&) = delete;
    LineProcess& operator=(const LineProcess&) = delete;

    void start(const std::vector<std::string>& argv,
               const std::vector<std::pair<std::string, std::string>>& extra_env = {});
    bool running() const { return pid_ > 0; }

    void write_line(const std::string& line);              // throws ChildExited on broken pipe
    std::optional<std::string> read_line(int timeout_ms);  // nullopt on timeout
    void stop();

private:
    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
};

}  // namespace agentopt::evalsub
