#include "stlasso/version.hpp"

namespace stlasso {

const char* version() { return STLASSO_VERSION_STRING; }

}  // namespace stlasso
