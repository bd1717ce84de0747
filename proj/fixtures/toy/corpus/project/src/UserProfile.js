"use strict";

class UserProfile {
  constructor(name, email, hidden) {
    this.name = name;
    this.email = email;
    this.hidden = hidden;
  }

  displayName() {
    if (this.hidden) {
      return "Anonymous";
    }
    return this.name;
  }

  maskedEmail() {
    const at = this.email.indexOf("@");
    return this.email[0] + "***" + this.email.slice(at);
  }
}

module.exports = { UserProfile };
