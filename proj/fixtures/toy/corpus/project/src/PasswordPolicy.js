"use strict";

class PasswordPolicy {
  constructor(minLength) {
    this.minLength = minLength;
  }

  isAcceptable(password, username) {
    if (password.length < this.minLength) {
      return false;
    }
    if (password.toLowerCase().includes(username.toLowerCase())) {
      return false;
    }
    return true;
  }
}

module.exports = { PasswordPolicy };
