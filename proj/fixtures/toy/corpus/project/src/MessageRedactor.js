"use strict";

const PHONE = /\d{3}-\d{4}/g;

class MessageRedactor {
  redact(text) {
    return text.replace(PHONE, "[phone]");
  }

  redactAll(messages) {
    return messages.map((m) => this.redact(m));
  }
}

module.exports = { MessageRedactor };
