"use strict";

const MINIMUM_AGE = 13;
const ADULT_AGE = 18;

class AgeGate {
  isAllowed(age) {
    return age >= MINIMUM_AGE;
  }

  needsParentalConsent(age) {
    return age >= MINIMUM_AGE && age < ADULT_AGE;
  }
}

module.exports = { AgeGate };
