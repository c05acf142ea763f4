#pragma once

#include "brn/green.hpp"

#include <memory>

namespace brn {

std::unique_ptr<GreenProvider> make_mfs_provider(DomainSpec spec);

}  // namespace brn
