#ifndef TRIPROD_TRIPROD_HPP
#define TRIPROD_TRIPROD_HPP

#include "triprod/gamma.hpp"
#include "triprod/haar.hpp"
#include "triprod/identities.hpp"
#include "triprod/lorentz.hpp"
#include "triprod/orbit.hpp"
#include "triprod/quadrature.hpp"
#include "triprod/report.hpp"
#include "triprod/settings.hpp"
#include "triprod/suites.hpp"
#include "triprod/triple_product.hpp"

#endif  // TRIPROD_TRIPROD_HPP
