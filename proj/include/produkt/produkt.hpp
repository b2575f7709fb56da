#pragma once

#include "produkt/error.hpp"
#include "produkt/random.hpp"
#include "produkt/field.hpp"
#include "produkt/matrix.hpp"
#include "produkt/group.hpp"
#include "produkt/subset.hpp"
#include "produkt/growth.hpp"
#include "produkt/decompose.hpp"
#include "produkt/constructive.hpp"
#include "produkt/config.hpp"
#include "produkt/certificate.hpp"
#include "produkt/report.hpp"
#include "produkt/runner.hpp"
