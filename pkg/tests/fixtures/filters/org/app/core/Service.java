package org.app.core;

public interface Service {

    void start();

    int status();
}
