package org.app.main;

import org.app.core.Service;
import org.app.core.ServiceImpl;

public class Main {

    private final Service service = new ServiceImpl();

    public void run() {
        service.start();
    }
}
