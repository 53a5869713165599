package org.gudy.azureus2.pluginsimpl.local.download;

import java.io.File;
import java.net.URL;
import java.util.ArrayList;
import java.util.Arrays;
import java.util.HashMap;
import java.util.List;
import java.util.Map;

import org.gudy.azureus2.plugins.download.Download;
import org.gudy.azureus2.plugins.download.DownloadEventNotifier;
import org.gudy.azureus2.plugins.download.DownloadManager;
import org.gudy.azureus2.plugins.download.DownloadManagerListener;
import org.gudy.azureus2.plugins.download.DownloadManagerStats;
import org.gudy.azureus2.plugins.download.DownloadStub;
import org.gudy.azureus2.plugins.download.DownloadWillBeAddedListener;
import org.gudy.azureus2.plugins.download.savelocation.SaveLocationManager;
import org.gudy.azureus2.plugins.torrent.Torrent;

public class DownloadManagerImpl implements DownloadManager {

    private final Object lock = new Object();
    private final List<Download> downloads = new ArrayList<>();
    private final List<DownloadManagerListener> listeners = new ArrayList<>();
    private List<DownloadWillBeAddedListener> willBeAddedListeners = new ArrayList<>();
    private final List<DownloadStub> stubs = new ArrayList<>();
    private final List<URL> pendingUrls = new ArrayList<>();
    private final Map<URL, URL> pendingReferrers = new HashMap<>();
    private SaveLocationManager saveLocationManager;
    private SaveLocationManager defaultSaveLocationManager;
    private DownloadEventNotifier globalNotifier;
    private DownloadManagerStats stats;
    private boolean seedingOnly;
    private int pausedCount;

    @Override
    public Download addDownload(Torrent torrent) {
        return addDownload(torrent, null, null);
    }

    @Override
    public Download addDownload(Torrent torrent, File torrentLocation, File dataLocation) {
        DownloadImpl d = new DownloadImpl(torrent, torrentLocation, dataLocation);
        synchronized (lock) {
            downloads.add(d);
        }
        return d;
    }

    @Override
    public void addDownload(URL url) {
        pendingUrls.add(url);
    }

    @Override
    public Download addNonPersistentDownload(Torrent torrent, File torrentLocation, File dataLocation) {
        return new DownloadImpl(torrent, torrentLocation, dataLocation);
    }

    @Override
    public Download getDownload(Torrent torrent) {
        return torrent == null ? null : getDownload(torrent.getHash());
    }

    @Override
    public Download getDownload(byte[] hash) {
        for (Download d : downloads) {
            if (Arrays.equals(d.getHash(), hash)) {
                return d;
            }
        }
        return null;
    }

    @Override
    public Download[] getDownloads() {
        return getDownloads(false);
    }

    @Override
    public Download[] getDownloads(boolean sorted) {
        synchronized (lock) {
            return downloads.toArray(new Download[0]);
        }
    }

    @Override
    public void pauseDownloads() {
        pausedCount = downloads.size();
    }

    @Override
    public void resumeDownloads() {
        pausedCount = 0;
    }

    @Override
    public void startAllDownloads() {
        resumeDownloads();
    }

    @Override
    public void stopAllDownloads() {
        pauseDownloads();
    }

    @Override
    public DownloadManagerStats getStats() {
        return stats;
    }

    @Override
    public boolean isSeedingOnly() {
        return seedingOnly;
    }

    @Override
    public void addListener(DownloadManagerListener listener) {
        addListener(listener, true);
    }

    @Override
    public void addListener(DownloadManagerListener listener, boolean notifyOfCurrentDownloads) {
        listeners.add(listener);
    }

    @Override
    public void removeListener(DownloadManagerListener listener) {
        removeListener(listener, false);
    }

    @Override
    public void removeListener(DownloadManagerListener listener, boolean notifyOfCurrentDownloads) {
        listeners.remove(listener);
    }

    @Override
    public void addDownloadWillBeAddedListener(DownloadWillBeAddedListener listener) {
        willBeAddedListeners.add(listener);
    }

    @Override
    public DownloadStub[] getDownloadStubs() {
        return stubs.toArray(new DownloadStub[0]);
    }

    @Override
    public int getDownloadStubCount() {
        return stubs.size();
    }

    @Override
    public DownloadStub lookupDownloadStub(byte[] hash) {
        return null;
    }

    @Override
    public void addExternalDownload(Download download) {
        downloads.add(download);
    }

    @Override
    public boolean canResumeDownloads() {
        synchronized (lock) {
            return pausedCount > 0;
        }
    }

    @Override
    public boolean canPauseDownloads() {
        synchronized (lock) {
            int active = downloads.size() - pausedCount;
            return active > 0;
        }
    }

    @Override
    public void setSaveLocationManager(SaveLocationManager manager) {
        if (manager == null) {
            manager = getDefaultSaveLocationManager();
        }
        saveLocationManager = manager;
        notifySaveLocationChanged(manager);
    }

    @Override
    public void removeDownloadWillBeAddedListener(DownloadWillBeAddedListener listener) {
        synchronized (lock) {
            List<DownloadWillBeAddedListener> copy = new ArrayList<>(willBeAddedListeners);
            copy.remove(listener);
            willBeAddedListeners = copy;
        }
    }

    @Override
    public void addDownload(URL url, URL referrer) {
        if (url == null) {
            throw new IllegalArgumentException("url");
        }
        pendingUrls.add(url);
        pendingReferrers.put(url, referrer);
    }

    @Override
    public DownloadEventNotifier getGlobalDownloadEventNotifier() {
        synchronized (lock) {
            if (globalNotifier == null) {
                globalNotifier = new DownloadEventNotifierImpl(this);
            }
            return globalNotifier;
        }
    }

    @Override
    public SaveLocationManager getSaveLocationManager() {
        SaveLocationManager current = saveLocationManager;
        if (current == null) {
            current = getDefaultSaveLocationManager();
        }
        return current;
    }

    @Override
    public SaveLocationManager getDefaultSaveLocationManager() {
        return defaultSaveLocationManager;
    }

    private void notifySaveLocationChanged(SaveLocationManager manager) {
        for (DownloadManagerListener l : listeners) {
            l.saveLocationChanged(manager);
        }
    }
}
