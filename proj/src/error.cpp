#include "biohybrid/error.hpp"

namespace biohybrid {

const char* to_string(Errc code) {
    switch (code) {
    case Errc::WrongLength: return "WrongLength";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::DuplicateSynapseId: return "DuplicateSynapseId";
    case Errc::SelfLoop: return "SelfLoop";
    case Errc::BadConfig: return "BadConfig";
    case Errc::NodeStartupFailure: return "NodeStartupFailure";
    case Errc::OutputIoError: return "OutputIoError";
    case Errc::InputIoError: return "InputIoError";
    }
    return "Unknown";
}

}  // namespace biohybrid
