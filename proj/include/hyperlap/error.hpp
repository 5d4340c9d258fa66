#pragma once

#include <stdexcept>
#include <string>

namespace hyperlap {

/**
 * Domain error carrying a module prefix and a machine-readable code.
 * what() renders as "module/Code: message" on a single line.
 */
class Error : public std::runtime_error
{
public:
    Error(std::string module, std::string code, const std::string& message)
        : std::runtime_error(module + "/" + code + ": " + message),
          module_(std::move(module)), code_(std::move(code))
    {
    }

    const std::string& module() const { return module_; }
    const std::string& code() const { return code_; }
    std::string tag() const { return module_ + "/" + code_; }

private:
    std::string module_;
    std::string code_;
};

} // namespace hyperlap
