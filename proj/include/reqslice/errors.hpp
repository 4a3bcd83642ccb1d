#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace reqslice {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// -- model files ------------------------------------------------------------

// Malformed file (not valid JSON).
class SyntaxError : public Error {
  public:
    using Error::Error;
};

// Structurally valid JSON that does not match the model schema
// (missing field, wrong type, unknown block type).
class SchemaError : public Error {
  public:
    using Error::Error;
};

// Schema-valid file whose contents break a model invariant
// (duplicate SID, dangling endpoint, unmatched From tag).
class IntegrityError : public Error {
  public:
    using Error::Error;
};

// -- textualizer ------------------------------------------------------------

class InvalidModel : public Error {
  public:
    using Error::Error;
};

// -- prompter ---------------------------------------------------------------

class MissingReasoning : public Error {
  public:
    using Error::Error;
};

class ExampleCountMismatch : public Error {
  public:
    using Error::Error;
};

// -- slicing backends -------------------------------------------------------

class NetworkError : public Error {
  public:
    using Error::Error;
};

class AuthError : public Error {
  public:
    using Error::Error;
};

class TokenLimitExceeded : public Error {
  public:
    using Error::Error;
};

class CassetteMiss : public Error {
  public:
    using Error::Error;
};

// The backend reply contained no integers at all. A literal empty list
// ("[]") is not an error; it parses to an empty block list.
class EmptyResponse : public Error {
  public:
    using Error::Error;
};

// -- requirements and fitness -----------------------------------------------

class ExprError : public Error {
  public:
    using Error::Error;
};

class UnknownSignal : public Error {
  public:
    explicit UnknownSignal(const std::string& name)
        : Error("unknown signal: " + name), signal(name) {}
    std::string signal;
};

class MissingSignal : public Error {
  public:
    explicit MissingSignal(const std::string& name)
        : Error("trace is missing signal: " + name), signal(name) {}
    std::string signal;
};

class MissingRange : public Error {
  public:
    explicit MissingRange(const std::string& inport)
        : Error("no input range declared for inport: " + inport), inport(inport) {}
    std::string inport;
};

class DivisionByZero : public Error {
  public:
    using Error::Error;
};

// -- simulator ----------------------------------------------------------------

class SimulationError : public Error {
  public:
    using Error::Error;
};

class AlgebraicLoop : public SimulationError {
  public:
    AlgebraicLoop(const std::string& msg, std::vector<int> cycle_sids)
        : SimulationError(msg), sids(std::move(cycle_sids)) {}
    std::vector<int> sids;
};

class NumericError : public SimulationError {
  public:
    NumericError(const std::string& msg, int sid, int step)
        : SimulationError(msg), sid(sid), step(step) {}
    int sid;
    int step;
};

class UnconnectedInput : public SimulationError {
  public:
    UnconnectedInput(const std::string& msg, int sid, int port)
        : SimulationError(msg), sid(sid), port(port) {}
    int sid;
    int port;
};

}  // namespace reqslice
